"""
list-functions command.
"""

import argparse
import json

from dgsmkit.cli.common import EXIT_OK, run_guarded
from dgsmkit.core.engine import DgsmEngine


def cmd_list_functions(args: argparse.Namespace) -> int:
    """Print registered functions as text or JSON."""

    def body() -> int:
        entries = DgsmEngine().list_functions()
        if args.json:
            print(json.dumps(entries, indent=2))
            return EXIT_OK
        for entry in entries:
            ref = "analytic reference" if entry["analytic_reference"] else "no analytic reference"
            print(f"{entry['name']}  (d={entry['dimension']}, {ref})")
            if entry["description"]:
                print(f"    {entry['description']}")
            for name, help_text in entry["params"].items():
                default = entry["defaults"].get(name)
                print(f"    --params {name}: {help_text} (default: {default})")
        return EXIT_OK

    return run_guarded(body)


def register_parser(subparsers: argparse._SubParsersAction) -> None:
    """Register the list-functions command."""
    parser = subparsers.add_parser("list-functions", help="List registered test functions")
    parser.add_argument("--json", action="store_true", help="Print JSON instead of text")
    parser.set_defaults(func=cmd_list_functions)
