"""
analyze command: Sobol' indices, DGSM and bounds for one registered function.
"""

import argparse
import csv
import io
import json
import logging

from tqdm import tqdm

from dgsmkit.cli.common import EXIT_OK, add_common_arguments, build_run_config, run_guarded, write_output
from dgsmkit.config import get_config
from dgsmkit.core.bounds import BoundsReport
from dgsmkit.core.engine import DgsmEngine

logger = logging.getLogger(__name__)

CSV_FIELDS = [
    "index", "s_i", "s_i_tot", "lb1", "lb2", "m_star", "lb_star", "ub1", "ub2",
    "mu", "nu", "zeta", "w_normal", "lb_normal", "ub_normal", "range_lower", "range_upper", "flags",
]


def report_to_csv(report: BoundsReport) -> str:
    """One row per variable; shared values (D, N, seed) repeat on every row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["function", "D", "N", "seed"] + CSV_FIELDS)
    for v in report.variables:
        row = v.to_dict()
        row["flags"] = ";".join(v.flags)
        cells = ["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k]) for k in CSV_FIELDS]
        writer.writerow([report.function, repr(report.variance), report.count, report.seed] + cells)
    return buffer.getvalue()


def cmd_analyze(args: argparse.Namespace) -> int:
    """Run the full pipeline and write the report."""

    def body() -> int:
        k = 1 if args.k is None else args.k
        run = build_run_config(args, n=get_config().n if args.n is None else args.n, k=k)
        engine = DgsmEngine()
        pbar = tqdm(total=run.k, unit="replicate", disable=None) if run.k > 1 else None
        try:
            report = engine.analyze(run, progress=pbar.update if pbar is not None else None)
        finally:
            if pbar is not None:
                pbar.close()

        if run.format == "csv":
            write_output(report_to_csv(report), run.out)
            return EXIT_OK
        data = report.to_dict()
        if args.compare:
            data["comparison"] = engine.compare(report, args.compare)
        write_output(json.dumps(data, indent=2), run.out)
        return EXIT_OK

    return run_guarded(body)


def register_parser(subparsers: argparse._SubParsersAction) -> None:
    """Register the analyze command."""
    parser = subparsers.add_parser("analyze", help="Estimate indices, DGSM and bounds for a function")
    add_common_arguments(parser)
    parser.add_argument("--n", "-n", type=int, help="Number of Sobol' points N (default: DGSM_N or 16384)")
    parser.add_argument("--k", "-k", type=int, help="Shifted replicates for mean/stderr (default: 1)")
    parser.add_argument("--compare", metavar="TABLE", help="Compare with a bundled table (g-function-8, hartmann6)")
    parser.set_defaults(func=cmd_analyze)
