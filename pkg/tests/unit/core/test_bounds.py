"""
Tests for the lower and upper bounds on total Sobol' indices and the report.
"""

import json
import logging

import numpy as np
import pytest

from dgsmkit.core.bounds import (
    FLAG_HEURISTIC_RANGE,
    FLAG_INERT,
    FLAG_TIGHT_UB2,
    BoundsError,
    BoundsReport,
    EvaluationLedger,
    ReportOptions,
    assemble_report,
    gamma,
    lb_star,
    lower_bound_one,
    maximize_gamma,
    normal_bounds,
    range_bounds,
    upper_bounds,
)
from dgsmkit.core.dgsm import DgsmSet, estimate_dgsm
from dgsmkit.core.model import ModelSpec
from dgsmkit.core.qmc import SamplePlan
from dgsmkit.core.variance import ConstantModelError
from dgsmkit.functions.g_function import make_g_function
from dgsmkit.functions.linear import make_linear, make_linear_normal


def _identity_model() -> ModelSpec:
    """f(x) = x on [0, 1]."""
    return make_linear([1.0], [0.0]).model


def _dgsm(nu, zeta=None, w_normal=None) -> DgsmSet:
    nu = np.asarray(nu, dtype=float)
    return DgsmSet(
        mu=np.sqrt(nu),
        nu=nu,
        zeta=None if zeta is None else np.asarray(zeta, dtype=float),
        m_grid=np.empty(0),
        w_curve=None,
        w_normal=None if w_normal is None else np.asarray(w_normal, dtype=float),
        count=1,
        evaluations_used=1,
    )


class TestLowerBounds:
    """Tests for LB1, g(m) and LB2."""

    def test_lb1_vanishes_for_g_function(self):
        """Test that f(1, z) = f(0, z) makes LB1 exactly zero."""
        model = make_g_function([0.0, 1.0, 4.5]).model
        assert np.all(lower_bound_one(model, SamplePlan(3, 256), D=0.5) == 0.0)

    def test_lb1_small_for_linear(self):
        """Test that LB1 is near zero for a linear model."""
        lb1 = lower_bound_one(_identity_model(), SamplePlan(1, 4096), D=1.0 / 12.0, nu=np.array([1.0]))
        assert lb1[0] < 1e-3

    def test_gamma_linear(self):
        """Test g(m) of f = x at the maximizer against its closed form."""
        m = 3.745
        expected = (2 * m + 1) * m**2 / (4 * (m + 2) ** 2 * (m + 1) ** 2) * 12.0
        value = gamma(_identity_model(), SamplePlan(1, 4096), m, D=1.0 / 12.0)
        assert value[0] == pytest.approx(expected, rel=0.01)

    def test_gamma_requires_positive_m(self):
        """Test that m must be positive."""
        with pytest.raises(BoundsError):
            gamma(_identity_model(), SamplePlan(1, 64), 0.0, D=1.0)

    def test_gamma_constant_model_is_zero(self):
        """Test that g(m) of a constant model is identically zero."""
        model = ModelSpec(2, lambda X: np.full(len(X), 2.0), gradient=lambda X: np.zeros_like(X))
        assert np.all(gamma(model, SamplePlan(2, 64), 2.0) == 0.0)

    def test_maximize_gamma_linear(self):
        """Test m* for f = x."""
        m_star, lb2 = maximize_gamma(_identity_model(), SamplePlan(1, 2**14), D=1.0 / 12.0)
        assert m_star[0] == pytest.approx(3.745, abs=0.01)
        assert lb2[0] == pytest.approx(0.4807, rel=0.01)

    @pytest.mark.parametrize("a", [[0.0], [9.0], [0.0, 1.0], [0.0, 1.0, 4.5, 9.0, 99.0, 99.0, 99.0, 99.0]])
    def test_maximize_gamma_g_function(self, a):
        """Test that the estimated m* of the g-function matches the closed form for every input."""
        function = make_g_function(a)
        expected = function.analytic.m_star()
        m_star, _ = maximize_gamma(function.model, SamplePlan(len(a), 2**14))
        for i, m in enumerate(m_star):
            assert m == pytest.approx(expected[i], abs=0.05), (a, i)

    def test_maximize_gamma_flat(self):
        """Test that a constant model has no maximizer."""
        model = ModelSpec(1, lambda X: np.ones(len(X)), gradient=lambda X: np.zeros_like(X))
        m_star, lb2 = maximize_gamma(model, SamplePlan(1, 64))
        assert m_star == [None]
        assert lb2.tolist() == [0.0]

    def test_lb1_requires_uniform_inputs(self):
        """Test that LB1 rejects Normal inputs."""
        model = make_linear_normal([1.0]).model
        with pytest.raises(BoundsError):
            lower_bound_one(model, SamplePlan(1, 16), D=1.0)

    def test_lb_star(self):
        """Test the componentwise maximum."""
        assert lb_star([0.1, 0.5], [0.3, 0.2]).tolist() == [0.3, 0.5]
        with pytest.raises(BoundsError):
            lb_star([0.1], [0.1, 0.2])


class TestUpperBounds:
    """Tests for UB1, UB2, range and Normal bounds."""

    def test_upper_bounds(self):
        """Test UB1 = nu/(pi^2 D) and UB2 = zeta/D."""
        ub1, ub2 = upper_bounds(_dgsm([np.pi**2], zeta=[0.5]), D=1.0)
        assert ub1[0] == pytest.approx(1.0)
        assert ub2[0] == pytest.approx(0.5)

    def test_upper_bounds_need_uniform_dgsm(self):
        """Test that UB1/UB2 are refused for Normal-input DGSM."""
        with pytest.raises(BoundsError):
            upper_bounds(_dgsm([1.0], w_normal=[1.0]), D=1.0)

    def test_upper_bounds_constant(self):
        """Test that D = 0 is refused."""
        with pytest.raises(ConstantModelError):
            upper_bounds(_dgsm([1.0], zeta=[0.1]), D=0.0)

    def test_range_bounds_uniform(self):
        """Test c^2/(12D) for f = x, where c = C = 1 pins S_tot = 1."""
        lower, upper = range_bounds([1.0], [1.0], D=1.0 / 12.0)
        assert lower[0] == pytest.approx(1.0)
        assert upper[0] == pytest.approx(1.0)

    def test_range_bounds_g_function(self):
        """Test range bounds of a one-dimensional g-function with a = 0."""
        lower, upper = range_bounds([4.0], [4.0], D=1.0 / 3.0)
        assert lower[0] == pytest.approx(4.0)
        assert upper[0] == pytest.approx(4.0)

    def test_range_bounds_normal(self):
        """Test sigma^2 c^2/D for a Normal input."""
        lower, upper = range_bounds([3.0], [3.0], D=36.0, distribution="normal", sigmas=[2.0])
        assert lower[0] == pytest.approx(1.0)
        assert upper[0] == pytest.approx(1.0)

    def test_range_bounds_invalid(self):
        """Test c > C, negative c and missing sigmas."""
        with pytest.raises(BoundsError):
            range_bounds([2.0], [1.0], D=1.0)
        with pytest.raises(BoundsError):
            range_bounds([-1.0], [1.0], D=1.0)
        with pytest.raises(BoundsError):
            range_bounds([1.0], [1.0], D=1.0, distribution="normal")

    def test_normal_bounds_tight_for_linear(self):
        """Test that the Normal bounds coincide for a linear model."""
        model = make_linear_normal([1.0, 2.0], sigmas=[1.0, 0.5]).model
        dgsm = estimate_dgsm(model, SamplePlan(2, 256))
        lower, upper = normal_bounds(dgsm, model.sigmas, D=2.0)
        assert np.allclose(lower, upper)
        assert np.allclose(upper, [0.5, 0.5])

    def test_normal_bounds_zero_sigma(self):
        """Test that sigma_i = 0 gives zero bounds."""
        lower, upper = normal_bounds(_dgsm([1.0, 4.0], w_normal=[1.0, 2.0]), [0.0, 1.0], D=1.0)
        assert lower[0] == 0.0 and upper[0] == 0.0


class TestLedger:
    """Tests for the evaluation ledger."""

    def test_uniform_counts(self):
        """Test N(3d+1) for the lower bounds and N(d+1) for the upper bounds."""
        ledger = EvaluationLedger.for_counts(1024, 8)
        assert ledger.n_f_lb == 1024 * 25
        assert ledger.n_f_ub == 1024 * 9
        assert ledger.n_f_s == 1024 * 9
        assert ledger.n_f_first_order_extra == 1024
        assert ledger.n_f_lb_adjoint == 1024 * 22
        assert ledger.n_f_ub_adjoint == 1024 * 6

    def test_normal_counts(self):
        """Test that Normal inputs need no face evaluations."""
        ledger = EvaluationLedger.for_counts(100, 3, uniform=False)
        assert ledger.n_f_lb == 400
        assert ledger.n_f_lb_adjoint == 600


class TestAssembleReport:
    """Tests for the full report."""

    def test_model_calls(self):
        """Test that the report records the evaluator rows it used."""
        model = make_g_function([0.0, 1.0, 4.5]).model
        report = assemble_report(model, SamplePlan(3, 256), ReportOptions(empirical_range=False))
        assert report.ledger.n_f_lb == 256 * 10
        assert report.ledger.model_calls["evaluator_rows"] == 256 * (3 + 2) + 2 * 256 * 3
        assert report.ledger.model_calls["gradient_rows"] == 256

    def test_identity_model(self):
        """Test the bounds of f = x against closed forms."""
        report = assemble_report(_identity_model(), SamplePlan(1, 16384))
        var = report.variables[0]
        assert var.s_i_tot == pytest.approx(1.0, abs=0.01)
        assert var.ub1 == pytest.approx(12.0 / np.pi**2, rel=0.01)
        assert var.ub2 == pytest.approx(var.s_i_tot, rel=0.01)
        assert var.lb_star == pytest.approx(0.4807, rel=0.01)
        assert var.m_star == pytest.approx(3.745, abs=0.01)
        assert FLAG_TIGHT_UB2 in var.flags

    def test_heuristic_range_flag(self, caplog):
        """Test that sample-range bounds are flagged and noted at INFO, not WARNING."""
        caplog.set_level(logging.INFO, logger="dgsmkit.core.bounds")
        report = assemble_report(_identity_model(), SamplePlan(1, 64))
        var = report.variables[0]
        assert FLAG_HEURISTIC_RANGE in var.flags
        assert var.range_lower == pytest.approx(var.range_upper)
        assert "not rigorous" in caplog.text
        assert not [r for r in caplog.records if r.levelno >= logging.WARNING]

    def test_user_range(self):
        """Test that user-supplied c and C are not flagged."""
        options = ReportOptions(range_c=[1.0], range_C=[1.0])
        var = assemble_report(_identity_model(), SamplePlan(1, 64), options).variables[0]
        assert FLAG_HEURISTIC_RANGE not in var.flags

    def test_inert_variable(self):
        """Test that a variable f does not depend on gets zero bounds."""
        model = make_linear([1.0, 0.0], [0.0, 0.0]).model
        var = assemble_report(model, SamplePlan(2, 256)).variables[1]
        assert FLAG_INERT in var.flags
        assert var.lb_star == 0.0 and var.ub1 == 0.0 and var.ub2 == 0.0
        assert var.m_star is None

    def test_normal_model(self):
        """Test that Normal inputs report the Normal bounds only."""
        model = make_linear_normal([1.0, 2.0], sigmas=[1.0, 0.5]).model
        report = assemble_report(model, SamplePlan(2, 1024))
        var = report.variables[0]
        assert report.distribution == "normal"
        assert var.lb1 is None and var.ub1 is None
        assert var.lb_normal == pytest.approx(var.ub_normal)
        assert var.lb_normal == pytest.approx(0.5, rel=0.02)

    def test_ranking(self):
        """Test that every bound orders distinct g-function inputs like S_tot."""
        model = make_g_function([0.0, 1.0, 4.5, 9.0]).model
        report = assemble_report(model, SamplePlan(4, 4096), ReportOptions(empirical_range=False))
        assert report.ranking["ranking_agrees"]
        assert report.ranking["orders"]["s_i_tot"] == [1, 2, 3, 4]

    def test_dimension_mismatch(self):
        """Test that the plan must match the model."""
        with pytest.raises(BoundsError):
            assemble_report(_identity_model(), SamplePlan(2, 16))

    def test_constant_model(self):
        """Test that a constant model is refused."""
        model = make_linear([0.0], [1.0]).model
        with pytest.raises(ConstantModelError):
            assemble_report(model, SamplePlan(1, 64))

    def test_json_round_trip(self):
        """Test that a report survives serialization."""
        model = make_g_function([0.0, 1.0]).model
        report = assemble_report(model, SamplePlan(2, 128))
        restored = BoundsReport.from_dict(json.loads(json.dumps(report.to_dict())))
        assert restored == report
        assert restored.schema_version == 1

    def test_unknown_schema_version(self):
        """Test that a newer schema is refused."""
        data = assemble_report(_identity_model(), SamplePlan(1, 32)).to_dict()
        data["schema_version"] = 2
        with pytest.raises(BoundsError):
            BoundsReport.from_dict(data)

    def test_value_lookup(self):
        """Test quantity lookup by name and 1-based variable."""
        report = assemble_report(_identity_model(), SamplePlan(1, 32))
        assert report.value("d") == report.variance
        assert report.value("s_tot", 1) == report.variables[0].s_i_tot
        with pytest.raises(KeyError):
            report.value("bogus", 1)
        with pytest.raises(KeyError):
            report.value("s", 2)
