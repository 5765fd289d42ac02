"""
Test functions with closed-form sensitivity references.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from dgsmkit.core.dgsm import default_m_grid
from dgsmkit.core.model import ModelSpec

logger = logging.getLogger(__name__)

# Quantities every analytic reference can be asked for (per variable unless noted).
QUANTITIES = (
    "d", "s", "s_tot", "nu", "zeta", "mu", "lb1", "lb2", "lb_star",
    "ub1", "ub2", "m_star", "w_normal", "lb_normal", "ub_normal",
)


class AnalyticReference:
    """
    Closed forms for one parameterized test function.

    Subclasses implement the primitive integrals they know (variance,
    first_order_variances, total_variances, nu, zeta, mu, a_integrals, w,
    lb1_integrals, w_normal, sigmas); everything else is derived here. A
    primitive that is not implemented makes the quantities depending on it
    unavailable.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension

    # primitives
    def variance(self) -> float:
        raise NotImplementedError

    def first_order_variances(self) -> np.ndarray:
        raise NotImplementedError

    def total_variances(self) -> np.ndarray:
        raise NotImplementedError

    def nu(self) -> np.ndarray:
        raise NotImplementedError

    def zeta(self) -> np.ndarray:
        raise NotImplementedError

    def mu(self) -> np.ndarray:
        raise NotImplementedError

    def a_integrals(self) -> np.ndarray:
        """A_i = E[f(1,z) - f(x)]."""
        raise NotImplementedError

    def w(self, p: float) -> np.ndarray:
        """w_i^(p) = E[x_i^p df/dx_i]."""
        raise NotImplementedError

    def lb1_integrals(self) -> np.ndarray:
        """E[(f(1,z) - f(0,z)) (f(1,z) + f(0,z) - 2 f(x))]."""
        raise NotImplementedError

    def w_normal(self) -> np.ndarray:
        raise NotImplementedError

    def sigmas(self) -> np.ndarray:
        raise NotImplementedError

    # derived
    def gamma(self, m: float) -> np.ndarray:
        D = self.variance()
        return (2.0 * m + 1.0) * (self.a_integrals() - self.w(m + 1.0)) ** 2 / ((m + 1.0) ** 2 * D)

    def m_star(self, m_range: tuple[float, float] = (0.1, 100.0)) -> np.ndarray:
        """Maximizer of gamma_i(m) per variable, refined to 1e-8 in m."""
        grid = default_m_grid(m_range, 256)
        curve = np.stack([self.gamma(m) for m in grid])
        result = np.full(self.dimension, np.nan)
        for i in range(self.dimension):
            if not np.any(curve[:, i] > 0):
                continue
            j = int(np.argmax(curve[:, i]))
            lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
            opt = minimize_scalar(
                lambda m: -float(self.gamma(m)[i]), bounds=(lo, hi), method="bounded", options={"xatol": 1e-8}
            )
            result[i] = float(opt.x)
        return result

    def lb2(self) -> np.ndarray:
        m = self.m_star()
        values = np.zeros(self.dimension)
        for i, mi in enumerate(m):
            if np.isfinite(mi):
                values[i] = self.gamma(mi)[i]
        return values

    def lb1(self) -> np.ndarray:
        nu = self.nu()
        safe = np.where(nu > 0, nu, 1.0)
        return np.where(nu > 0, self.lb1_integrals() ** 2 / (4.0 * safe * self.variance()), 0.0)

    @cached_property
    def vectors(self) -> dict[str, np.ndarray]:
        """Every available quantity as a d-vector ('d' as a 1-vector)."""
        derivations = {
            "d": lambda: np.array([self.variance()]),
            "s": lambda: self.first_order_variances() / self.variance(),
            "s_tot": lambda: self.total_variances() / self.variance(),
            "nu": self.nu,
            "zeta": self.zeta,
            "mu": self.mu,
            "lb1": self.lb1,
            "lb2": self.lb2,
            "lb_star": lambda: np.maximum(self.lb1(), self.lb2()),
            "ub1": lambda: self.nu() / (np.pi**2 * self.variance()),
            "ub2": lambda: self.zeta() / self.variance(),
            "m_star": self.m_star,
            "w_normal": self.w_normal,
            "lb_normal": lambda: self.sigmas() ** 2 * self.w_normal() ** 2 / self.variance(),
            "ub_normal": lambda: self.sigmas() ** 2 * self.nu() / self.variance(),
        }
        out = {}
        for name, fn in derivations.items():
            try:
                out[name] = np.asarray(fn(), dtype=float)
            except NotImplementedError:
                continue
        return out

    @property
    def available(self) -> list[str]:
        return list(self.vectors)

    def value(self, quantity: str, variable: int | None = None) -> float | None:
        """Reference value, or None when no closed form exists; variable is 1-based."""
        vec = self.vectors.get(quantity)
        if vec is None:
            return None
        if quantity == "d":
            return float(vec[0])
        if variable is None or not 1 <= variable <= self.dimension:
            raise ValueError(f"variable must be in 1..{self.dimension}, got {variable}")
        v = float(vec[variable - 1])
        return None if np.isnan(v) else v


@dataclass
class TestFunction:
    """A named benchmark model with its parameters and optional analytic reference."""
    __test__ = False  # not a pytest class

    name: str
    model: ModelSpec
    params: dict[str, Any] = field(default_factory=dict)
    analytic: AnalyticReference | None = None
    description: str = ""

    @property
    def dimension(self) -> int:
        return self.model.dimension

    @property
    def has_reference(self) -> bool:
        return self.analytic is not None

    def reference(self, quantity: str, variable: int | None = None) -> float | None:
        if self.analytic is None:
            return None
        return self.analytic.value(quantity, variable)

    def reference_section(self) -> dict[str, Any] | None:
        """Per-quantity analytic values for the report, as plain lists."""
        if self.analytic is None:
            return None
        section: dict[str, Any] = {}
        for name, vec in self.analytic.vectors.items():
            if name == "d":
                section[name] = float(vec[0])
            else:
                section[name] = [None if np.isnan(v) else float(v) for v in vec]
        return section
