"""
Tests for the model abstraction: evaluation, domains and derivatives.
"""

import numpy as np
import pytest

from dgsmkit.core.model import (
    DimensionMismatchError,
    DistributionSpec,
    DomainError,
    ModelError,
    ModelSpec,
    NonFiniteValueError,
    check_gradient,
    counted,
    evaluate,
    evaluate_batch,
    gradient,
    gradient_batch,
    gradient_cost,
    restrict,
    transform_points,
)


def _sum_model() -> ModelSpec:
    return ModelSpec(2, lambda X: X[:, 0] + X[:, 1], name="sum")


def _quadratic_model() -> ModelSpec:
    """f = x1^2 x2 without an analytic gradient."""
    return ModelSpec(2, lambda X: X[:, 0] ** 2 * X[:, 1], name="quad")


class TestModelSpec:
    """Tests for ModelSpec construction."""

    def test_default_domain_is_uniform(self):
        """Test that an omitted domain means Uniform01 inputs."""
        model = _sum_model()
        assert model.is_uniform
        assert len(model.domain) == 2
        assert np.allclose(model.sigmas, np.sqrt(1.0 / 12.0))

    def test_mixed_domain_rejected(self):
        """Test that Uniform01 and Normal inputs cannot be mixed."""
        with pytest.raises(ModelError):
            ModelSpec(2, lambda X: X[:, 0], domain=(DistributionSpec.uniform(), DistributionSpec.normal(0, 1)))

    def test_domain_length_checked(self):
        """Test that the domain must have d entries."""
        with pytest.raises(DimensionMismatchError):
            ModelSpec(3, lambda X: X[:, 0], domain=(DistributionSpec.uniform(),))

    def test_normal_requires_positive_sigma(self):
        """Test that Normal inputs need sigma > 0."""
        with pytest.raises(ModelError):
            DistributionSpec.normal(0.0, 0.0)

    def test_distribution_round_trip(self):
        """Test DistributionSpec dict conversion."""
        spec = DistributionSpec.normal(1.5, 2.0)
        assert DistributionSpec.from_dict(spec.to_dict()) == spec

    def test_from_pointwise(self):
        """Test wrapping a scalar-per-point callable."""
        model = ModelSpec.from_pointwise(lambda x: x[0] * x[1], 2, gradient=lambda x: [x[1], x[0]])
        assert evaluate(model, [0.5, 0.4]) == pytest.approx(0.2)
        assert np.allclose(gradient(model, [0.5, 0.4]), [0.4, 0.5])


class TestEvaluate:
    """Tests for single-point and batch evaluation."""

    def test_evaluate_point(self):
        """Test evaluation at a single point."""
        assert evaluate(_sum_model(), [0.5, 0.5]) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        """Test that points must have d coordinates."""
        with pytest.raises(DimensionMismatchError):
            evaluate(_sum_model(), [0.1, 0.2, 0.3])

    def test_outside_unit_cube(self):
        """Test that uniform models reject points outside [0, 1]^d."""
        with pytest.raises(DomainError):
            evaluate(_sum_model(), [1.5, 0.2])

    def test_non_finite_carries_point(self):
        """Test that a non-finite value aborts and reports the point."""
        model = ModelSpec(1, lambda X: np.log(X[:, 0]))
        with pytest.raises(NonFiniteValueError) as exc_info:
            evaluate_batch(model, np.array([[0.5], [0.0]]))
        assert exc_info.value.point.tolist() == [0.0]

    def test_threads_do_not_change_values(self):
        """Test that block-parallel evaluation keeps the point order."""
        X = np.random.default_rng(0).random((1000, 2))
        serial = evaluate_batch(_sum_model(), X, threads=1, block_size=64)
        parallel = evaluate_batch(_sum_model(), X, threads=4, block_size=64)
        assert np.array_equal(serial, parallel)

    def test_normal_transform(self):
        """Test the inverse-CDF transform for Normal inputs."""
        model = ModelSpec(1, lambda X: X[:, 0], domain=(DistributionSpec.normal(2.0, 3.0),))
        X = transform_points(model, np.array([[0.5], [0.975]]))
        assert X[0, 0] == pytest.approx(2.0)
        assert X[1, 0] == pytest.approx(2.0 + 3.0 * 1.959963985, rel=1e-9)


class TestGradient:
    """Tests for analytic and finite-difference derivatives."""

    def test_central_differences(self):
        """Test central differences at an interior point."""
        g = gradient(_quadratic_model(), [0.3, 0.7])
        assert np.allclose(g, [0.42, 0.09], rtol=1e-6)

    def test_forward_differences(self):
        """Test the forward scheme on a linear model."""
        model = ModelSpec(2, lambda X: 3.0 * X[:, 0] + X[:, 1])
        assert np.allclose(gradient(model, [0.2, 0.6], scheme="forward"), [3.0, 1.0], rtol=1e-6)

    def test_one_sided_stencil_at_faces(self):
        """Test derivatives on the faces of the unit cube."""
        model = ModelSpec(1, lambda X: X[:, 0] ** 2)
        G = gradient_batch(model, np.array([[0.0], [1.0]]))
        assert G[0, 0] == pytest.approx(0.0, abs=1e-7)
        assert G[1, 0] == pytest.approx(2.0, rel=1e-7)

    def test_analytic_gradient_used(self):
        """Test that an analytic gradient is preferred over differences."""
        model = ModelSpec(1, lambda X: X[:, 0], gradient=lambda X: np.full_like(X, 7.0))
        assert gradient(model, [0.5])[0] == 7.0

    def test_gradient_cost(self):
        """Test the extra evaluations charged per point."""
        assert gradient_cost(_quadratic_model(), "central") == 4
        assert gradient_cost(_quadratic_model(), "forward") == 2
        model = ModelSpec(1, lambda X: X[:, 0], gradient=lambda X: np.ones_like(X))
        assert gradient_cost(model) == 0

    def test_check_gradient(self):
        """Test the analytic-vs-FD harness on correct and wrong gradients."""
        points = np.array([[0.2, 0.3], [0.6, 0.9]])
        good = ModelSpec(2, lambda X: X[:, 0] ** 2 * X[:, 1],
                         gradient=lambda X: np.stack([2 * X[:, 0] * X[:, 1], X[:, 0] ** 2], axis=1))
        bad = ModelSpec(2, good.evaluator, gradient=lambda X: 2.0 * good.gradient(X))
        assert check_gradient(good, points) <= 1.0
        assert check_gradient(bad, points) > 1.0

    def test_check_gradient_requires_gradient(self):
        """Test that the harness needs an analytic gradient."""
        with pytest.raises(ModelError):
            check_gradient(_quadratic_model(), np.array([[0.5, 0.5]]))


class TestRestrictAndCount:
    """Tests for freezing inputs and counting calls."""

    def test_restrict(self):
        """Test that inactive inputs are frozen at the given values."""
        model = ModelSpec(3, lambda X: X @ np.array([1.0, 2.0, 3.0]), gradient=lambda X: np.tile([1.0, 2.0, 3.0], (len(X), 1)))
        sub = restrict(model, [0, 2], [0.0, 0.5, 0.0])
        assert sub.dimension == 2
        assert evaluate(sub, [1.0, 1.0]) == pytest.approx(5.0)
        assert np.allclose(gradient(sub, [0.2, 0.2]), [1.0, 3.0])

    def test_restrict_invalid_indices(self):
        """Test that active indices are validated."""
        with pytest.raises(ModelError):
            restrict(_sum_model(), [0, 0], [0.5, 0.5])

    def test_counted(self):
        """Test that evaluator rows are tallied."""
        model, counter = counted(_sum_model())
        evaluate_batch(model, np.full((10, 2), 0.5))
        gradient_batch(model, np.full((3, 2), 0.5))
        assert counter.evaluator_rows == 10 + 3 * 4
        assert counter.gradient_rows == 0
