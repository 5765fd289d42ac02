"""
convergence command: RMSE against closed forms over shifted replicates.
"""

import argparse
import json

from tqdm import tqdm

from dgsmkit.bench.convergence import tables_to_csv, tables_to_dict
from dgsmkit.cli.common import EXIT_OK, add_common_arguments, build_run_config, run_guarded, write_output
from dgsmkit.config import get_config, parse_range
from dgsmkit.core.engine import DgsmEngine

DEFAULT_N_GRID = "256:16384"


def _split(raw: str) -> list[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


def cmd_convergence(args: argparse.Namespace) -> int:
    """Write one RMSE table per requested quantity and variable."""

    def body() -> int:
        if args.k is not None and args.k < 2:
            raise ValueError(f"--k must be >= 2 for convergence runs, got {args.k}")
        quantities = _split(args.quantity)
        variables = [int(v) for v in _split(args.variable)]
        run = build_run_config(
            args,
            k=get_config().k if args.k is None else args.k,
            n_grid=parse_range(args.n_grid, int),
            quantity=args.quantity,
            variable=variables[0] if variables else None,
        )
        n_values = run.n_values()
        if not n_values:
            raise ValueError(f"--n-grid {args.n_grid} contains no power of two")

        engine = DgsmEngine()
        with tqdm(total=len(n_values) * run.k, unit="replicate", disable=None) as pbar:
            tables = engine.convergence(run, quantities, variables, progress=pbar.update)

        if run.format == "csv":
            write_output(tables_to_csv(tables), run.out)
        else:
            write_output(json.dumps(tables_to_dict(tables), indent=2), run.out)
        return EXIT_OK

    return run_guarded(body)


def register_parser(subparsers: argparse._SubParsersAction) -> None:
    """Register the convergence command."""
    parser = subparsers.add_parser("convergence", help="RMSE versus N against analytic references")
    add_common_arguments(parser)
    parser.add_argument("--quantity", "-q", default="s_tot", help="Quantities, comma separated (s_tot,lb2,ub1,...)")
    parser.add_argument("--variable", "-i", default="1", help="1-based variables, comma separated")
    parser.add_argument("--k", "-k", type=int, help="Replicates per N, >= 2 (default: DGSM_K or 25)")
    parser.add_argument("--n-grid", default=DEFAULT_N_GRID, help="Powers of two in lo:hi")
    parser.set_defaults(func=cmd_convergence)
