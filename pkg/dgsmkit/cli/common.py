"""
Helpers shared by the dgsmkit subcommands: run configuration, output, exit codes.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from dgsmkit.bench.convergence import MissingReferenceError, TrendFitError
from dgsmkit.config import RunConfig, get_config, parse_params, parse_range
from dgsmkit.core.bounds import BoundsError
from dgsmkit.core.model import ModelError, NonFiniteValueError
from dgsmkit.core.qmc import SamplePlanError
from dgsmkit.core.variance import ConstantModelError, OracleError
from dgsmkit.functions.registry import RegistryError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONSTANT_MODEL = 3
EXIT_MISSING_REFERENCE = 4


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by analyze and convergence."""
    parser.add_argument("--function", "-f", required=True, help="Registered function name (see list-functions)")
    parser.add_argument("--params", "-p", help="Function parameters: inline JSON, @file.json or @file.yml")
    parser.add_argument("--seed", type=int, help="Seed for replicate shifts (default: DGSM_SEED or 20140101)")
    parser.add_argument("--m-range", default=None, help="Exponent range lo:hi for the m* search")
    parser.add_argument("--dist", choices=["uniform", "normal"], help="Override the input distribution")
    parser.add_argument("--means", type=float, nargs="+", help="Normal means, one per input")
    parser.add_argument("--sigmas", type=float, nargs="+", help="Normal standard deviations, one per input")
    parser.add_argument("--out", "-o", default="-", help="Output path, '-' for stdout")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="Output format")
    parser.add_argument("--threads", type=int, help="Worker threads, 0 = all cores")


def build_run_config(args: argparse.Namespace, **extra: Any) -> RunConfig:
    """RunConfig from parsed flags, filling gaps from DgsmConfig. Raises ValueError/ValidationError."""
    config = get_config()
    fields: dict[str, Any] = {
        "function": args.function,
        "params": parse_params(args.params),
        "seed": config.seed if args.seed is None else args.seed,
        "m_range": config.m_range if args.m_range is None else parse_range(args.m_range),
        "dist": args.dist,
        "means": args.means,
        "sigmas": args.sigmas,
        "out": args.out,
        "format": args.format,
        "threads": config.threads if args.threads is None else args.threads,
    }
    fields.update(extra)
    return RunConfig(**fields)


def write_output(text: str, out: str) -> None:
    """Data goes to stdout for '-', otherwise to the file; relative paths land under DGSM_OUTPUT_DIR."""
    if out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        sys.stdout.flush()
        return
    path = Path(out)
    if not path.is_absolute():
        path = get_config().output_dir / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)


def run_guarded(command: Callable[[], int]) -> int:
    """Run a command body and map library errors to the documented exit codes."""
    try:
        return command()
    except ConstantModelError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONSTANT_MODEL
    except MissingReferenceError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_MISSING_REFERENCE
    except ValidationError as e:
        print(f"Error: invalid arguments:\n{e}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (RegistryError, BoundsError, SamplePlanError, ModelError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OracleError, TrendFitError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
