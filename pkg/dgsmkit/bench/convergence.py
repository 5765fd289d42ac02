"""
RMSE convergence of estimates against closed-form references.

For each N the quantity is estimated on K randomly shifted copies of the same
Sobol' point set and

    eps = sqrt(mean_k ((I_k - I0) / I0)^2)

is recorded (absolute error when I0 = 0). A trend c N^(-alpha) is fitted by
least squares on the logarithms.
"""

import csv
import io
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from dgsmkit.config import DEFAULT_SEED
from dgsmkit.core.bounds import BoundsReport, ReportOptions, assemble_report
from dgsmkit.core.qmc import SamplePlan, replicate_plans
from dgsmkit.functions.base import TestFunction
from dgsmkit.utils.numeric import stable_mean
from dgsmkit.utils.parallel import resolve_threads

logger = logging.getLogger(__name__)

MIN_FIT_ROWS = 3
MIN_R_SQUARED = 0.9
CSV_COLUMNS = ["quantity", "variable", "N", "rmse", "K"]


class MissingReferenceError(Exception):
    """Raised when a function has no closed form for the requested quantity."""
    pass


class TrendFitError(Exception):
    """Raised when a power-law trend cannot be fitted."""
    pass


@dataclass
class TrendFit:
    """eps ~ c N^(-alpha)."""
    c: float
    alpha: float
    r_squared: float
    excluded: list[int] = field(default_factory=list)  # N values left out of the fit

    def to_dict(self) -> dict[str, Any]:
        return {"c": self.c, "alpha": self.alpha, "r_squared": self.r_squared, "excluded": list(self.excluded)}


@dataclass
class ConvergenceRow:
    n: int
    rmse: float


@dataclass
class ConvergenceTable:
    """RMSE per N for one quantity of one variable (1-based; None for 'd')."""
    function: str
    quantity: str
    variable: int | None
    replicates: int
    seed: int
    reference: float
    absolute: bool = False
    rows: list[ConvergenceRow] = field(default_factory=list)
    fit: TrendFit | None = None

    @property
    def n_values(self) -> list[int]:
        return [row.n for row in self.rows]

    @property
    def rmse(self) -> list[float]:
        return [row.rmse for row in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {
            "function": self.function,
            "quantity": self.quantity,
            "variable": self.variable,
            "K": self.replicates,
            "seed": self.seed,
            "reference": self.reference,
            "absolute": self.absolute,
            "rows": [{"N": row.n, "rmse": row.rmse} for row in self.rows],
            "fit": None if self.fit is None else self.fit.to_dict(),
        }


def _options(threads: int = 1) -> ReportOptions:
    return ReportOptions(threads=threads, empirical_range=False)


def _report_value(report: BoundsReport, quantity: str, variable: int | None) -> float:
    value = report.value(quantity, variable)
    return float("nan") if value is None else float(value)


def _run_replicates(
    plans: list[SamplePlan],
    estimate: Callable[[SamplePlan], Any],
    threads: int,
    progress: Callable[[int], None] | None,
) -> list[Any]:
    def task(plan: SamplePlan) -> Any:
        result = estimate(plan)
        if progress is not None:
            progress(1)
        return result

    workers = resolve_threads(threads)
    if workers <= 1:
        return [task(plan) for plan in plans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, plans))


def rmse(estimates: Sequence[float], reference: float) -> tuple[float, bool]:
    """(eps, absolute) over replicate estimates; absolute error when reference is 0."""
    values = np.asarray(estimates, dtype=float)
    absolute = reference == 0.0
    errors = values - reference if absolute else (values - reference) / reference
    return float(np.sqrt(stable_mean(errors**2))), absolute


def rmse_convergence(
    function: TestFunction,
    quantity: str,
    variable: int | None,
    n_values: Sequence[int],
    K: int = 25,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    progress: Callable[[int], None] | None = None,
    estimator: Callable[[SamplePlan], float] | None = None,
) -> ConvergenceTable:
    """
    RMSE of quantity against the analytic reference over K shifted replicates per N.
    estimator replaces the report-based estimate (plan -> value).
    Example: rmse_convergence(g, "s_tot", 1, [256, 512, 1024], K=25, seed=7)
    """
    if estimator is None:
        return convergence_tables(function, [(quantity, variable)], n_values, K, seed, threads, progress)[0]

    table = _new_tables(function, [(quantity, variable)], n_values, K, seed)[0]
    for n in sorted(int(v) for v in n_values):
        plans = replicate_plans(function.dimension, n, K, seed)
        _add_row(table, n, _run_replicates(plans, estimator, threads, progress))
    _finish(table)
    return table


def convergence_tables(
    function: TestFunction,
    targets: Sequence[tuple[str, int | None]],
    n_values: Sequence[int],
    K: int = 25,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    progress: Callable[[int], None] | None = None,
) -> list[ConvergenceTable]:
    """
    One RMSE table per (quantity, variable) target. Each replicate plan is
    assembled into a single report and every target is read from it, so
    progress advances once per report.
    """
    tables = _new_tables(function, targets, n_values, K, seed)
    for n in sorted(int(v) for v in n_values):
        plans = replicate_plans(function.dimension, n, K, seed)
        reports: list[BoundsReport] = _run_replicates(
            plans, lambda plan: assemble_report(function.model, plan, _options()), threads, progress
        )
        for table in tables:
            _add_row(table, n, [_report_value(r, table.quantity, table.variable) for r in reports])
    for table in tables:
        _finish(table)
    return tables


def _new_tables(
    function: TestFunction,
    targets: Sequence[tuple[str, int | None]],
    n_values: Sequence[int],
    K: int,
    seed: int,
) -> list[ConvergenceTable]:
    if K < 2:
        raise ValueError(f"K >= 2 replicates required, got {K}")
    if len(n_values) == 0:
        raise ValueError("n_values must not be empty")
    if len(targets) == 0:
        raise ValueError("at least one (quantity, variable) target is required")
    tables = []
    for quantity, variable in targets:
        reference = function.reference(quantity, variable)
        if reference is None:
            raise MissingReferenceError(f"'{function.name}' has no analytic reference for {quantity}")
        tables.append(ConvergenceTable(
            function=function.name,
            quantity=quantity,
            variable=variable,
            replicates=K,
            seed=seed,
            reference=reference,
        ))
    return tables


def _add_row(table: ConvergenceTable, n: int, values: Sequence[float]) -> None:
    eps, table.absolute = rmse(values, table.reference)
    table.rows.append(ConvergenceRow(n=n, rmse=eps))
    logger.debug("%s %s x%s N=%d: rmse %.4g", table.function, table.quantity, table.variable, n, eps)


def _finish(table: ConvergenceTable) -> None:
    if len(table.rows) >= MIN_FIT_ROWS:
        try:
            table.fit = fit_trend(table)
        except TrendFitError as e:
            logger.warning("No trend for %s %s: %s", table.function, table.quantity, e)
    if table.absolute:
        logger.warning("Reference %s of %s is 0; RMSE is absolute", table.quantity, table.function)


def _least_squares(log_n: np.ndarray, log_eps: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(log_n, log_eps, 1)
    predicted = slope * log_n + intercept
    ss_res = float(np.sum((log_eps - predicted) ** 2))
    ss_tot = float(np.sum((log_eps - log_eps.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(np.exp(intercept)), float(-slope), r_squared


def fit_trend(table: ConvergenceTable | Sequence[tuple[int, float]]) -> TrendFit:
    """
    Fit eps = c N^(-alpha) on (log N, log eps). Rows with eps = 0 are excluded;
    if R^2 < 0.9 the smallest N is dropped once and the fit repeated.
    """
    rows = [(r.n, r.rmse) for r in table.rows] if isinstance(table, ConvergenceTable) else list(table)
    rows.sort()
    usable = [(n, e) for n, e in rows if np.isfinite(e) and e > 0]
    excluded = [n for n, e in rows if not (np.isfinite(e) and e > 0)]
    if excluded:
        logger.warning("Excluding rows with zero or undefined error from the fit: N=%s", excluded)
    if len(usable) < MIN_FIT_ROWS:
        raise TrendFitError(f"need {MIN_FIT_ROWS} rows with positive error, got {len(usable)}")

    n = np.array([r[0] for r in usable], dtype=float)
    eps = np.array([r[1] for r in usable], dtype=float)
    c, alpha, r2 = _least_squares(np.log(n), np.log(eps))
    if r2 < MIN_R_SQUARED and len(usable) > MIN_FIT_ROWS:
        logger.warning("Trend fit R^2=%.3f; dropping preasymptotic row N=%d", r2, int(n[0]))
        excluded.append(int(n[0]))
        c, alpha, r2 = _least_squares(np.log(n[1:]), np.log(eps[1:]))
    return TrendFit(c=c, alpha=alpha, r_squared=r2, excluded=sorted(excluded))


def replicate_statistics(
    function: TestFunction,
    quantities: Sequence[str],
    count: int,
    K: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    progress: Callable[[int], None] | None = None,
) -> dict[str, dict[str, list[float]]]:
    """
    Mean and standard error of each quantity over K shifted replicates.
    Returns {quantity: {"mean": [...], "stderr": [...]}} with one entry per
    variable ('d' has a single entry).
    """
    if K < 2:
        raise ValueError(f"K >= 2 replicates required, got {K}")
    plans = replicate_plans(function.dimension, count, K, seed)
    reports: list[BoundsReport] = _run_replicates(
        plans, lambda plan: assemble_report(function.model, plan, _options()), threads, progress
    )
    stats: dict[str, dict[str, list[float]]] = {}
    for quantity in quantities:
        if quantity == "d":
            samples = np.array([[r.variance] for r in reports])
        else:
            samples = np.array(
                [[np.nan if v is None else v for v in r.column(quantity)] for r in reports], dtype=float
            )
        mean = samples.mean(axis=0)
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(K)
        stats[quantity] = {"mean": mean.tolist(), "stderr": stderr.tolist()}
    return stats


def tables_to_csv(tables: Sequence[ConvergenceTable]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for table in tables:
        for row in table.rows:
            writer.writerow([table.quantity, "" if table.variable is None else table.variable,
                             row.n, repr(row.rmse), table.replicates])
    return buffer.getvalue()


def tables_to_dict(tables: Sequence[ConvergenceTable]) -> dict[str, Any]:
    return {"schema_version": 1, "tables": [t.to_dict() for t in tables]}
