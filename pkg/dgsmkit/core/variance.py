"""
Total variance, first-order and total Sobol' indices.

The QMC estimators work from two independent blocks A and B carved
columnwise out of one 2d-dimensional Sobol' sequence. Totals use Jansen's
squared-difference estimator, first-order indices the B-pivot pick-freeze
estimator:

    S_i^tot = mean((f(A) - f(A_B^i))^2) / (2 D)
    S_i     = mean(f(B) * (f(A_B^i) - f(A))) / D

where A_B^i is A with its i-th column taken from B. A tensor-product
Gauss-Legendre oracle evaluates the defining integrals directly for d <= 4.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss

from dgsmkit.core.model import DimensionMismatchError, ModelSpec, evaluate_batch, transform_points
from dgsmkit.core.qmc import SamplePlan, sobol_points
from dgsmkit.utils.numeric import stable_mean

logger = logging.getLogger(__name__)

# D below this fraction of E[f^2] is treated as a constant model.
CONSTANT_RTOL = 1e-12
ORACLE_MAX_DIMENSION = 4


class ConstantModelError(Exception):
    """Raised when the output variance is (numerically) zero."""
    pass


class OracleError(Exception):
    """Raised when the quadrature oracle cannot deliver the requested accuracy."""
    pass


@dataclass
class VarianceEstimate:
    """Mean f0 and total variance D from one point set."""
    mean: float
    variance: float
    count: int
    evaluations_used: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "count": self.count,
            "evaluations_used": self.evaluations_used,
        }


@dataclass
class IndexEstimate:
    """First-order and total Sobol' indices with the variance they are normalized by."""
    first_order: np.ndarray
    total: np.ndarray
    variance: float
    count: int
    evaluations_used: int
    mean: float = float("nan")

    @property
    def total_variances(self) -> np.ndarray:
        """D_i^tot = S_i^tot * D."""
        return self.total * self.variance

    def to_dict(self) -> dict[str, Any]:
        return {
            "first_order": self.first_order.tolist(),
            "total": self.total.tolist(),
            "variance": self.variance,
            "mean": self.mean,
            "count": self.count,
            "evaluations_used": self.evaluations_used,
        }


@dataclass
class PickFreezeSample:
    """Model values on the A, B and A_B^i blocks (inputs already in physical space)."""
    A: np.ndarray
    B: np.ndarray
    fA: np.ndarray
    fB: np.ndarray
    fAB: np.ndarray  # (N, d): column i holds f(A_B^i)
    unit_A: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return self.A.shape[0]

    @property
    def dimension(self) -> int:
        return self.A.shape[1]


def _mean_and_variance(values: np.ndarray) -> tuple[float, float]:
    f0 = float(stable_mean(values))
    D = float(stable_mean((values - f0) ** 2))
    return f0, D


def check_variance(D: float, second_moment: float, name: str = "model") -> None:
    """Refuse (near-)zero variance: every index and bound divides by D."""
    if not D > CONSTANT_RTOL * max(second_moment, np.finfo(float).tiny):
        raise ConstantModelError(
            f"output variance of '{name}' is {D:.3g}; the model is constant on the sampled points"
        )


def estimate_variance(
    model: ModelSpec,
    plan: SamplePlan,
    threads: int = 1,
    block_size: int = 4096,
) -> VarianceEstimate:
    """
    f0 and D = mean(f^2) - mean(f)^2 from the plan's points.
    Example: estimate_variance(linear_model, SamplePlan(1, 8192)).variance ~ 1/12
    """
    if plan.dimension != model.dimension:
        raise DimensionMismatchError(f"plan dimension {plan.dimension} != model dimension {model.dimension}")
    X = transform_points(model, sobol_points(plan))
    f = evaluate_batch(model, X, threads, block_size)
    f0, D = _mean_and_variance(f)
    check_variance(D, float(stable_mean(f**2)), model.name)
    logger.debug("Variance of %s: f0=%.6g D=%.6g (N=%d)", model.name, f0, D, plan.count)
    return VarianceEstimate(mean=f0, variance=D, count=plan.count, evaluations_used=plan.count)


def pick_freeze_sample(
    model: ModelSpec,
    plan: SamplePlan,
    threads: int = 1,
    block_size: int = 4096,
) -> PickFreezeSample:
    """Evaluate f on A, B and every A_B^i: N(d+2) evaluations."""
    d = model.dimension
    if plan.dimension != d:
        raise DimensionMismatchError(f"plan dimension {plan.dimension} != model dimension {d}")
    P = sobol_points(plan.paired())
    unit_A, unit_B = P[:, :d], P[:, d:]
    A = transform_points(model, unit_A)
    B = transform_points(model, unit_B)
    N = plan.count

    stacked = np.repeat(A[None, :, :], d, axis=0)  # (d, N, d)
    for i in range(d):
        stacked[i, :, i] = B[:, i]
    fA = evaluate_batch(model, A, threads, block_size)
    fB = evaluate_batch(model, B, threads, block_size)
    fAB = evaluate_batch(model, stacked.reshape(d * N, d), threads, block_size).reshape(d, N).T
    return PickFreezeSample(A=A, B=B, fA=fA, fB=fB, fAB=fAB, unit_A=unit_A)


def indices_from_sample(sample: PickFreezeSample, D: float) -> tuple[np.ndarray, np.ndarray]:
    """(first_order, total) from a pick-freeze sample and the shared D."""
    diff = sample.fA[:, None] - sample.fAB
    total = np.asarray(stable_mean(diff**2, axis=0)) / (2.0 * D)
    first = np.asarray(stable_mean(sample.fB[:, None] * (sample.fAB - sample.fA[:, None]), axis=0)) / D
    return first, total


def sample_variance(sample: PickFreezeSample, name: str = "model") -> tuple[float, float]:
    """(f0, D) pooled over the A and B blocks."""
    pooled = np.concatenate([sample.fA, sample.fB])
    f0, D = _mean_and_variance(pooled)
    check_variance(D, float(stable_mean(pooled**2)), name)
    return f0, D


def estimate_indices(
    model: ModelSpec,
    plan: SamplePlan,
    threads: int = 1,
    block_size: int = 4096,
) -> IndexEstimate:
    """
    S_i and S_i^tot by pick-freeze. Totals cost N(d+1) evaluations (A and the
    d blocks A_B^i); the first-order estimator adds the B block, N more.
    """
    sample = pick_freeze_sample(model, plan, threads, block_size)
    f0, D = sample_variance(sample, model.name)
    first, total = indices_from_sample(sample, D)
    N, d = plan.count, model.dimension
    return IndexEstimate(
        first_order=first,
        total=total,
        variance=D,
        count=N,
        evaluations_used=N * (d + 2),
        mean=f0,
    )


def gauss_legendre_01(nodes_per_axis: int, panels: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [0, 1] with equal panels."""
    if panels < 1 or nodes_per_axis < panels or nodes_per_axis % panels:
        raise OracleError(f"nodes_per_axis ({nodes_per_axis}) must be a positive multiple of panels ({panels})")
    per_panel = nodes_per_axis // panels
    t, w = leggauss(per_panel)
    width = 1.0 / panels
    nodes = np.concatenate([(p + (t + 1.0) / 2.0) * width for p in range(panels)])
    weights = np.concatenate([w * width / 2.0 for _ in range(panels)])
    return nodes, weights


def tensor_grid(dimension: int, nodes_per_axis: int, panels: int = 2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(points (n^d, d), tensor weights of shape (n,)*d, 1-d nodes)."""
    x, w = gauss_legendre_01(nodes_per_axis, panels)
    mesh = np.meshgrid(*([x] * dimension), indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=1)
    weights = w
    for _ in range(dimension - 1):
        weights = np.multiply.outer(weights, w)
    return points, weights, x


def _oracle_once(model: ModelSpec, nodes_per_axis: int, panels: int) -> tuple[float, float, np.ndarray, np.ndarray]:
    d = model.dimension
    points, W, _ = tensor_grid(d, nodes_per_axis, panels)
    _, w1 = gauss_legendre_01(nodes_per_axis, panels)
    shape = (nodes_per_axis,) * d
    F = evaluate_batch(model, points).reshape(shape)

    f0 = float(np.sum(W * F))
    D = float(np.sum(W * (F - f0) ** 2))
    total = np.empty(d)
    first = np.empty(d)
    for i in range(d):
        # v(z) = integral of f over x_i; u_i = f - v
        v = np.expand_dims(np.tensordot(F, w1, axes=([i], [0])), axis=i)
        total[i] = np.sum(W * (F - v) ** 2)
        # E[f | x_i]: integrate out every other axis
        cond = np.moveaxis(F, i, 0)
        for _ in range(d - 1):
            cond = np.tensordot(cond, w1, axes=([1], [0]))
        first[i] = np.sum(w1 * (cond - f0) ** 2)
    return f0, D, first, total


def oracle_indices(
    model: ModelSpec,
    nodes_per_axis: int = 32,
    panels: int = 2,
    tolerance: float | None = 1e-6,
) -> IndexEstimate:
    """
    Brute-force indices by tensor-product Gauss-Legendre quadrature of
    u_i = f - integral of f over x_i, for d <= 4 and Uniform01 inputs.
    With tolerance set, a second run at half the nodes per panel must agree
    (relative to D) or OracleError is raised.
    """
    d = model.dimension
    if d > ORACLE_MAX_DIMENSION:
        raise OracleError(f"oracle supports d <= {ORACLE_MAX_DIMENSION}, got {d}")
    if not model.is_uniform:
        raise OracleError("oracle integrates over the unit cube; Normal inputs are not supported")

    f0, D, first_var, total_var = _oracle_once(model, nodes_per_axis, panels)
    check_variance(D, D + f0**2, model.name)

    coarse_nodes = (nodes_per_axis // panels // 2) * panels
    if tolerance is not None and coarse_nodes >= panels:
        _, Dc, first_c, total_c = _oracle_once(model, coarse_nodes, panels)
        gap = max(abs(D - Dc), float(np.max(np.abs(total_var - total_c))), float(np.max(np.abs(first_var - first_c))))
        if gap > tolerance * D:
            raise OracleError(
                f"quadrature not converged for '{model.name}': {nodes_per_axis} vs {coarse_nodes} nodes "
                f"differ by {gap / D:.3g} relative to D"
            )

    evaluations = nodes_per_axis**d
    return IndexEstimate(
        first_order=first_var / D,
        total=total_var / D,
        variance=D,
        count=evaluations,
        evaluations_used=evaluations,
        mean=f0,
    )
