"""
Sobol' g-function: f(x) = prod_i (|4 x_i - 2| + a_i) / (1 + a_i) on [0, 1]^d.
"""

from collections.abc import Sequence

import numpy as np

from dgsmkit.core.model import ModelError, ModelSpec
from dgsmkit.functions.base import AnalyticReference, TestFunction


def _factors(X: np.ndarray, a: np.ndarray) -> np.ndarray:
    return (np.abs(4.0 * X - 2.0) + a) / (1.0 + a)


def _leave_one_out_products(G: np.ndarray) -> np.ndarray:
    """prod_{j != i} G[:, j] for every i, without dividing by G (factors may be 0)."""
    n, d = G.shape
    left = np.ones((n, d))
    right = np.ones((n, d))
    for i in range(1, d):
        left[:, i] = left[:, i - 1] * G[:, i - 1]
        right[:, d - 1 - i] = right[:, d - i] * G[:, d - i]
    return left * right


class GFunctionReference(AnalyticReference):
    """Closed forms; every quantity factorizes over the variables."""

    def __init__(self, a: np.ndarray):
        super().__init__(a.size)
        self.a = a
        self.partial = 1.0 / (3.0 * (1.0 + a) ** 2)  # D_i

    def _others(self) -> np.ndarray:
        """prod_{j != i} (1 + D_j)."""
        return _leave_one_out_products((1.0 + self.partial)[None, :])[0]

    def variance(self) -> float:
        return float(np.prod(1.0 + self.partial) - 1.0)

    def first_order_variances(self) -> np.ndarray:
        return self.partial

    def total_variances(self) -> np.ndarray:
        return self.partial * self._others()

    def nu(self) -> np.ndarray:
        return 16.0 / (1.0 + self.a) ** 2 * self._others()

    def zeta(self) -> np.ndarray:
        return self.nu() / 12.0

    def mu(self) -> np.ndarray:
        return 4.0 / (1.0 + self.a)

    def a_integrals(self) -> np.ndarray:
        return 1.0 / (1.0 + self.a)

    def w(self, p: float) -> np.ndarray:
        return 4.0 * (1.0 - 2.0 ** (-p)) / ((1.0 + self.a) * (p + 1.0))

    def lb1_integrals(self) -> np.ndarray:
        # g_i(1) = g_i(0)
        return np.zeros(self.dimension)


def make_g_function(a: Sequence[float]) -> TestFunction:
    """
    g-function with importance parameters a_i >= 0 (small a_i = important x_i).
    At x_i = 1/2 the derivative sign is taken as +1.
    """
    a_vec = np.asarray(a, dtype=float).reshape(-1)
    if a_vec.size == 0:
        raise ModelError("g-function needs at least one coefficient a_i")
    if np.any(a_vec < 0) or not np.all(np.isfinite(a_vec)):
        raise ModelError(f"g-function coefficients must be finite and >= 0, got {a_vec.tolist()}")

    def evaluator(X: np.ndarray) -> np.ndarray:
        return np.prod(_factors(X, a_vec), axis=1)

    def grad(X: np.ndarray) -> np.ndarray:
        slopes = 4.0 * np.where(X >= 0.5, 1.0, -1.0) / (1.0 + a_vec)
        return slopes * _leave_one_out_products(_factors(X, a_vec))

    model = ModelSpec(a_vec.size, evaluator, grad, name="g-function")
    return TestFunction(
        name="g-function",
        model=model,
        params={"a": a_vec.tolist()},
        analytic=GFunctionReference(a_vec),
        description="prod (|4x-2| + a_i)/(1 + a_i)",
    )
