"""
Smooth product: f(x) = prod_i (1 + c_i P2(x_i)), P2(x) = 6x^2 - 6x + 1.

P2 is the degree-2 shifted Legendre polynomial (mean 0, mean square 1/5), so
the closed forms factorize like the g-function's, without the kink at 1/2.
"""

from collections.abc import Sequence

import numpy as np

from dgsmkit.core.model import ModelError, ModelSpec
from dgsmkit.functions.base import AnalyticReference, TestFunction
from dgsmkit.functions.g_function import _leave_one_out_products


def _p2(x: np.ndarray) -> np.ndarray:
    return 6.0 * x**2 - 6.0 * x + 1.0


class SmoothProductReference(AnalyticReference):
    def __init__(self, c: np.ndarray):
        super().__init__(c.size)
        self.c = c
        self.partial = c**2 / 5.0

    def _others(self) -> np.ndarray:
        return _leave_one_out_products((1.0 + self.partial)[None, :])[0]

    def variance(self) -> float:
        return float(np.prod(1.0 + self.partial) - 1.0)

    def first_order_variances(self) -> np.ndarray:
        return self.partial

    def total_variances(self) -> np.ndarray:
        return self.partial * self._others()

    def nu(self) -> np.ndarray:
        # E[P2'^2] = 12
        return 12.0 * self.c**2 * self._others()

    def zeta(self) -> np.ndarray:
        # 1/2 E[x(1-x) P2'^2] = 3/5
        return 0.6 * self.c**2 * self._others()

    def mu(self) -> np.ndarray:
        # E|P2'| = 3; E|1 + c P2| = 1 only while every factor stays >= 0
        if np.any((self.c < -1.0) | (self.c > 2.0)):
            raise NotImplementedError
        return 3.0 * np.abs(self.c)

    def a_integrals(self) -> np.ndarray:
        return self.c.copy()

    def w(self, p: float) -> np.ndarray:
        return self.c * (12.0 / (p + 2.0) - 6.0 / (p + 1.0))

    def lb1_integrals(self) -> np.ndarray:
        # P2(1) = P2(0)
        return np.zeros(self.dimension)


def make_smooth_product(c: Sequence[float]) -> TestFunction:
    """Product of 1 + c_i P2(x_i); smooth on the closed cube."""
    coeffs = np.asarray(c, dtype=float).reshape(-1)
    if coeffs.size == 0 or not np.all(np.isfinite(coeffs)):
        raise ModelError(f"smooth-product needs finite coefficients, got {coeffs.tolist()}")

    def evaluator(X: np.ndarray) -> np.ndarray:
        return np.prod(1.0 + coeffs * _p2(X), axis=1)

    def grad(X: np.ndarray) -> np.ndarray:
        return coeffs * (12.0 * X - 6.0) * _leave_one_out_products(1.0 + coeffs * _p2(X))

    model = ModelSpec(coeffs.size, evaluator, grad, name="smooth-product")
    return TestFunction(
        name="smooth-product",
        model=model,
        params={"c": coeffs.tolist()},
        analytic=SmoothProductReference(coeffs),
        description="prod (1 + c_i (6x^2 - 6x + 1))",
    )
