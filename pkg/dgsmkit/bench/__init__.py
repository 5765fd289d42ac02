"""Convergence benchmarking."""

from dgsmkit.bench.convergence import (
    ConvergenceTable,
    MissingReferenceError,
    TrendFit,
    TrendFitError,
    convergence_tables,
    fit_trend,
    replicate_statistics,
    rmse_convergence,
)

__all__ = [
    "ConvergenceTable",
    "MissingReferenceError",
    "TrendFit",
    "TrendFitError",
    "convergence_tables",
    "fit_trend",
    "replicate_statistics",
    "rmse_convergence",
]
