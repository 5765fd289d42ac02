"""
dgsmkit engine - orchestrates registry, sampling and bound assembly for the CLI.
"""

import logging
from collections.abc import Callable
from dataclasses import replace
from typing import Any

from dgsmkit.bench.convergence import ConvergenceTable, convergence_tables, replicate_statistics
from dgsmkit.config import DgsmConfig, RunConfig, get_config
from dgsmkit.core.bounds import BoundsError, BoundsReport, ReportOptions, assemble_report
from dgsmkit.core.model import DistributionSpec
from dgsmkit.core.qmc import SamplePlan
from dgsmkit.functions.base import TestFunction
from dgsmkit.functions.registry import FunctionRegistry, RegistryError, default_registry
from dgsmkit.functions.tables import compare_with_reference

# Quantities summarized over replicates when analyze runs with K > 1.
REPLICATE_QUANTITIES = ("d", "s", "s_tot", "lb_star", "ub1", "ub2")
REPLICATE_QUANTITIES_NORMAL = ("d", "s", "s_tot", "lb_normal", "ub_normal")


class DgsmEngine:
    """
    Main engine tying the function registry to the estimators.
    Example: engine = DgsmEngine(); report = engine.analyze(RunConfig(function="g-function"))
    """

    def __init__(self, config: DgsmConfig | None = None, registry: FunctionRegistry | None = None):
        self.logger = logging.getLogger(__name__)
        self.config = config or get_config()
        self.registry = registry if registry is not None else default_registry()

    def list_functions(self) -> list[dict[str, Any]]:
        """Names, dimensions, parameters and reference availability."""
        return self.registry.describe()

    def build_function(self, run: RunConfig) -> TestFunction:
        """Instantiate run.function and apply any distribution override."""
        params = dict(run.params)
        if run.dist == "normal" and run.function == "linear-normal":
            params.setdefault("sigmas", run.sigmas)
            if run.means is not None:
                params.setdefault("means", run.means)
            return self.registry.create(run.function, params)

        function = self.registry.create(run.function, params)
        if run.dist is None:
            return function

        d = function.dimension
        if run.dist == "normal":
            means = run.means or [0.0] * len(run.sigmas)
            if len(run.sigmas) != d:
                raise RegistryError(f"--sigmas has {len(run.sigmas)} entries for a {d}-dimensional function")
            domain = [DistributionSpec.normal(m, s) for m, s in zip(means, run.sigmas)]
        else:
            domain = [DistributionSpec.uniform() for _ in range(d)]
        if tuple(domain) == function.model.domain:
            return function
        self.logger.info("Overriding the input distribution of %s; analytic references dropped", function.name)
        return replace(function, model=function.model.with_domain(domain), analytic=None)

    def report_options(self, run: RunConfig) -> ReportOptions:
        return ReportOptions(
            m_range=run.m_range,
            m_grid_points=self.config.m_grid_points,
            scheme=self.config.fd_scheme,
            threads=run.threads,
            block_size=self.config.block_size,
        )

    def analyze(self, run: RunConfig, progress: Callable[[int], None] | None = None) -> BoundsReport:
        """
        Full report on the unshifted Sobol' points; with K > 1 the report also
        carries mean and standard error over K shifted replicates.
        """
        function = self.build_function(run)
        if run.variable is not None and run.variable > function.dimension:
            raise BoundsError(f"variable {run.variable} out of range 1..{function.dimension}")
        plan = SamplePlan(function.dimension, run.n, seed=run.seed)
        self.logger.debug("Analyzing %s (d=%d, N=%d)", function.name, function.dimension, run.n)
        report = assemble_report(function.model, plan, self.report_options(run))
        report.reference = function.reference_section()
        if run.k > 1:
            quantities = REPLICATE_QUANTITIES if function.model.is_uniform else REPLICATE_QUANTITIES_NORMAL
            report.replicates = {
                "K": run.k,
                "statistics": replicate_statistics(
                    function, quantities, run.n, run.k, run.seed, run.threads, progress
                ),
            }
        return report

    def convergence(
        self,
        run: RunConfig,
        quantities: list[str],
        variables: list[int | None],
        progress: Callable[[int], None] | None = None,
    ) -> list[ConvergenceTable]:
        """One RMSE table per (quantity, variable); each replicate report serves every table."""
        function = self.build_function(run)
        targets: list[tuple[str, int | None]] = []
        for quantity in quantities:
            for variable in ([None] if quantity == "d" else variables):
                if variable is not None and variable > function.dimension:
                    raise BoundsError(f"variable {variable} out of range 1..{function.dimension}")
                targets.append((quantity, variable))
        return convergence_tables(function, targets, run.n_values(), run.k, run.seed, run.threads, progress)

    def compare(self, report: BoundsReport, table: str) -> dict[str, Any]:
        """Compare a report with a bundled published table."""
        return compare_with_reference(report, table)
