"""
Tests for the DgsmEngine orchestration layer.
"""

import pytest

from dgsmkit.config import DgsmConfig, RunConfig
from dgsmkit.core.bounds import BoundsError
from dgsmkit.core.engine import DgsmEngine
from dgsmkit.functions.registry import FunctionRegistry, UnknownFunctionError


@pytest.fixture
def engine():
    return DgsmEngine(config=DgsmConfig())


class TestDgsmEngine:
    """Tests for DgsmEngine."""

    def test_list_functions(self, engine):
        """Test that every bundled function is listed."""
        names = [entry["name"] for entry in engine.list_functions()]
        assert {"g-function", "linear", "linear-normal", "smooth-product", "hartmann6"} <= set(names)

    def test_empty_registry(self):
        """Test an engine over an empty registry."""
        assert DgsmEngine(config=DgsmConfig(), registry=FunctionRegistry()).list_functions() == []

    def test_unknown_function(self, engine):
        """Test that unknown names raise."""
        with pytest.raises(UnknownFunctionError):
            engine.build_function(RunConfig(function="nope"))

    def test_analyze_with_reference(self, engine):
        """Test that the report carries analytic values."""
        run = RunConfig(function="linear", params={"a": [1.0], "b": [0.0]}, n=1024)
        report = engine.analyze(run)
        assert report.reference["s_tot"] == [pytest.approx(1.0)]
        assert report.variables[0].s_i_tot == pytest.approx(1.0, abs=0.02)
        assert report.replicates is None

    def test_analyze_replicates(self, engine):
        """Test the replicate summary when K > 1."""
        run = RunConfig(function="g-function", params={"a": [0.0, 1.0]}, n=128, k=3)
        report = engine.analyze(run)
        assert report.replicates["K"] == 3
        assert len(report.replicates["statistics"]["s_tot"]["mean"]) == 2
        assert len(report.replicates["statistics"]["d"]["mean"]) == 1

    def test_distribution_override(self, engine):
        """Test that a Normal override drops the analytic reference."""
        run = RunConfig(function="g-function", params={"a": [0.0, 1.0]}, dist="normal", sigmas=[1.0, 1.0])
        function = engine.build_function(run)
        assert not function.model.is_uniform
        assert function.analytic is None

    def test_linear_normal_sigmas(self, engine):
        """Test that linear-normal takes sigmas from the run."""
        run = RunConfig(function="linear-normal", params={"a": [1.0, 1.0]}, dist="normal", sigmas=[2.0, 3.0])
        function = engine.build_function(run)
        assert function.model.sigmas.tolist() == [2.0, 3.0]
        assert function.has_reference

    def test_variable_out_of_range(self, engine):
        """Test that a variable beyond d is refused."""
        run = RunConfig(function="linear", n=64, variable=3)
        with pytest.raises(BoundsError):
            engine.analyze(run)

    def test_convergence(self, engine):
        """Test one RMSE table per quantity and variable."""
        run = RunConfig(function="g-function", params={"a": [0.0, 1.0]}, k=2, n_grid=(64, 256))
        tables = engine.convergence(run, ["s_tot", "d"], [1, 2])
        assert [(t.quantity, t.variable) for t in tables] == [("s_tot", 1), ("s_tot", 2), ("d", None)]
        assert tables[0].n_values == [64, 128, 256]
        assert all(eps >= 0 for eps in tables[0].rmse)
