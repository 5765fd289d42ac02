"""
Models linear in every input.

make_linear: f(x) = a(z) x_1 + b(z), z = (x_2, ..., x_d), with affine
a(z) = a_0 + sum_k a_k z_k and b(z) = b_0 + sum_k b_k z_k on [0, 1]^d.
Every variable enters f linearly, so UB2 equals S^tot for all of them and
LB1 vanishes.

make_linear_normal: f(x) = sum_j a_j x_j with x_j ~ N(mean_j, sigma_j^2).
"""

from collections.abc import Sequence

import numpy as np

from dgsmkit.core.model import DistributionSpec, ModelError, ModelSpec
from dgsmkit.functions.base import AnalyticReference, TestFunction


class LinearReference(AnalyticReference):
    """
    With t = x_1 - 1/2 and u_k = z_k - 1/2 the model is
    const + abar t + sum_k c_k u_k + sum_k a_k u_k t, c_k = a_k/2 + b_k,
    a sum of orthogonal terms.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray):
        super().__init__(a.size)
        self.a = a
        self.b = b
        self.abar = a[0] + 0.5 * a[1:].sum()
        self.c = 0.5 * a[1:] + b[1:]
        # E[a(z)^2]
        self.a_sq = self.abar**2 + (a[1:] ** 2).sum() / 12.0

    def variance(self) -> float:
        return float(self.abar**2 / 12.0 + (self.c**2).sum() / 12.0 + (self.a[1:] ** 2).sum() / 144.0)

    def first_order_variances(self) -> np.ndarray:
        return np.concatenate([[self.abar**2 / 12.0], self.c**2 / 12.0])

    def total_variances(self) -> np.ndarray:
        return np.concatenate([[self.a_sq / 12.0], self.c**2 / 12.0 + self.a[1:] ** 2 / 144.0])

    def nu(self) -> np.ndarray:
        return np.concatenate([[self.a_sq], self.c**2 + self.a[1:] ** 2 / 12.0])

    def zeta(self) -> np.ndarray:
        return self.nu() / 12.0

    def _slope_means(self) -> np.ndarray:
        """E[df/dx_i]."""
        return np.concatenate([[self.abar], self.c])

    def a_integrals(self) -> np.ndarray:
        return 0.5 * self._slope_means()

    def w(self, p: float) -> np.ndarray:
        return self._slope_means() / (p + 1.0)

    def lb1_integrals(self) -> np.ndarray:
        return np.zeros(self.dimension)


def make_linear(a_coeffs: Sequence[float], b_coeffs: Sequence[float] | None = None) -> TestFunction:
    """
    f = a(z) x_1 + b(z); both coefficient vectors are [c_0, c_1, ..., c_{d-1}].
    Example: make_linear([1], [0]) is f(x) = x_1
    """
    a = np.asarray(a_coeffs, dtype=float).reshape(-1)
    b = np.zeros_like(a) if b_coeffs is None else np.asarray(b_coeffs, dtype=float).reshape(-1)
    if a.size == 0:
        raise ModelError("linear model needs at least one coefficient")
    if a.size != b.size:
        raise ModelError(f"a has {a.size} coefficients, b has {b.size}; both must be [c_0, ..., c_(d-1)]")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ModelError("linear coefficients must be finite")

    def evaluator(X: np.ndarray) -> np.ndarray:
        Z = X[:, 1:]
        return (a[0] + Z @ a[1:]) * X[:, 0] + b[0] + Z @ b[1:]

    def grad(X: np.ndarray) -> np.ndarray:
        Z = X[:, 1:]
        G = np.empty_like(X)
        G[:, 0] = a[0] + Z @ a[1:]
        G[:, 1:] = X[:, :1] * a[1:] + b[1:]
        return G

    model = ModelSpec(a.size, evaluator, grad, name="linear")
    return TestFunction(
        name="linear",
        model=model,
        params={"a": a.tolist(), "b": b.tolist()},
        analytic=LinearReference(a, b),
        description="a(z) x_1 + b(z), a and b affine in z = (x_2..x_d)",
    )


class LinearNormalReference(AnalyticReference):
    def __init__(self, a: np.ndarray, sigmas: np.ndarray):
        super().__init__(a.size)
        self.a = a
        self._sigmas = sigmas

    def variance(self) -> float:
        return float((self.a**2 * self._sigmas**2).sum())

    def first_order_variances(self) -> np.ndarray:
        return self.a**2 * self._sigmas**2

    def total_variances(self) -> np.ndarray:
        return self.first_order_variances()

    def nu(self) -> np.ndarray:
        return self.a**2

    def mu(self) -> np.ndarray:
        return np.abs(self.a)

    def w_normal(self) -> np.ndarray:
        return self.a

    def sigmas(self) -> np.ndarray:
        return self._sigmas


def make_linear_normal(
    a: Sequence[float],
    means: Sequence[float] | None = None,
    sigmas: Sequence[float] | None = None,
) -> TestFunction:
    """f = sum_j a_j x_j with independent Normal inputs (defaults: N(0, 1))."""
    coeffs = np.asarray(a, dtype=float).reshape(-1)
    d = coeffs.size
    if d == 0:
        raise ModelError("linear-normal model needs at least one coefficient")
    mu = np.zeros(d) if means is None else np.asarray(means, dtype=float).reshape(-1)
    sd = np.ones(d) if sigmas is None else np.asarray(sigmas, dtype=float).reshape(-1)
    if mu.size != d or sd.size != d:
        raise ModelError(f"means and sigmas need {d} entries each")
    domain = tuple(DistributionSpec.normal(m, s) for m, s in zip(mu, sd))

    model = ModelSpec(
        d,
        lambda X: X @ coeffs,
        lambda X: np.broadcast_to(coeffs, X.shape).copy(),
        domain,
        name="linear-normal",
    )
    return TestFunction(
        name="linear-normal",
        model=model,
        params={"a": coeffs.tolist(), "means": mu.tolist(), "sigmas": sd.tolist()},
        analytic=LinearNormalReference(coeffs, sd),
        description="sum a_j x_j, x_j ~ N(mean_j, sigma_j^2)",
    )
