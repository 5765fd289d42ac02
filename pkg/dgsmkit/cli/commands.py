"""
CLI entry point for dgsmkit.
"""

import argparse
import logging
import os
import sys

from dgsmkit.cli import cmd_analyze, cmd_convergence, cmd_functions


def setup_logging() -> None:
    """Diagnostics go to stderr; DEBUG=1 turns on debug output."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if os.getenv("DEBUG") else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dgsmkit",
        description="dgsmkit - Sobol' indices, derivative-based sensitivity measures and their bounds",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    cmd_analyze.register_parser(subparsers)
    cmd_convergence.register_parser(subparsers)
    cmd_functions.register_parser(subparsers)

    args = parser.parse_args(argv)
    setup_logging()

    if not args.command:
        parser.print_help()
        return 0

    if hasattr(args, "func"):
        return args.func(args)

    parser.print_help()
    return 1


if __name__ == "__main__":
    sys.exit(main())
