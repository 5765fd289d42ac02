"""
Tests for variance and Sobol' index estimation.
"""

import numpy as np
import pytest

from dgsmkit.core.model import ModelSpec
from dgsmkit.core.qmc import SamplePlan
from dgsmkit.core.variance import (
    ConstantModelError,
    OracleError,
    estimate_indices,
    estimate_variance,
    gauss_legendre_01,
    oracle_indices,
)
from dgsmkit.functions.g_function import make_g_function


def _additive() -> ModelSpec:
    return ModelSpec(2, lambda X: X[:, 0] + 2.0 * X[:, 1], name="additive")


class TestVariance:
    """Tests for estimate_variance."""

    def test_uniform_variance(self):
        """Test that Var(x) on [0, 1] is 1/12."""
        model = ModelSpec(1, lambda X: X[:, 0])
        estimate = estimate_variance(model, SamplePlan(1, 8192))
        assert estimate.variance == pytest.approx(1.0 / 12.0, abs=1e-3)
        assert estimate.mean == pytest.approx(0.5, abs=1e-3)
        assert estimate.evaluations_used == 8192

    def test_constant_model(self):
        """Test that a constant model is refused."""
        model = ModelSpec(2, lambda X: np.full(len(X), 3.0), name="constant")
        with pytest.raises(ConstantModelError):
            estimate_variance(model, SamplePlan(2, 64))


class TestIndices:
    """Tests for pick-freeze indices."""

    def test_additive_model(self):
        """Test S = S_tot = (1/5, 4/5) for x1 + 2 x2."""
        estimate = estimate_indices(_additive(), SamplePlan(2, 4096))
        assert np.allclose(estimate.total, [0.2, 0.8], atol=0.01)
        assert np.allclose(estimate.first_order, [0.2, 0.8], atol=0.01)

    def test_evaluation_count(self):
        """Test that N(d+2) evaluations are charged."""
        estimate = estimate_indices(_additive(), SamplePlan(2, 128))
        assert estimate.evaluations_used == 128 * 4
        assert estimate.count == 128

    def test_total_variances(self):
        """Test that D_i^tot = S_i^tot D."""
        estimate = estimate_indices(_additive(), SamplePlan(2, 256))
        assert np.allclose(estimate.total_variances, estimate.total * estimate.variance)

    def test_constant_model(self):
        """Test that indices of a constant model are refused."""
        model = ModelSpec(3, lambda X: np.zeros(len(X)))
        with pytest.raises(ConstantModelError):
            estimate_indices(model, SamplePlan(3, 64))


class TestOracle:
    """Tests for the quadrature oracle."""

    def test_weights_sum_to_one(self):
        """Test composite Gauss-Legendre weights on [0, 1]."""
        nodes, weights = gauss_legendre_01(16, panels=2)
        assert weights.sum() == pytest.approx(1.0)
        assert np.all((nodes > 0) & (nodes < 1))

    def test_nodes_must_divide_panels(self):
        """Test that nodes per axis must be a multiple of the panel count."""
        with pytest.raises(OracleError):
            gauss_legendre_01(15, panels=2)

    def test_g_function_exact(self):
        """Test the oracle against g-function closed forms."""
        function = make_g_function([0.0, 1.0])
        result = oracle_indices(function.model)
        assert result.variance == pytest.approx(function.analytic.variance(), rel=1e-10)
        assert np.allclose(result.total, function.analytic.total_variances() / function.analytic.variance(), rtol=1e-9)
        assert np.allclose(
            result.first_order, function.analytic.first_order_variances() / function.analytic.variance(), rtol=1e-9
        )

    def test_dimension_limit(self):
        """Test that the oracle is restricted to d <= 4."""
        with pytest.raises(OracleError):
            oracle_indices(make_g_function([0.0] * 5).model)
