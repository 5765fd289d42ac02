"""
Lower and upper bounds on total Sobol' indices from DGSM.

Uniform01 inputs:

    LB1_i   = (E[(f(1,z) - f(0,z)) (f(1,z) + f(0,z) - 2 f(x))])^2 / (4 nu_i D)
    g_i(m)  = (2m + 1) (A_i - w_i^(m+1))^2 / ((m + 1)^2 D),   A_i = E[f(1,z) - f(x)]
    LB2_i   = max over m of g_i(m),   LB*_i = max(LB1_i, LB2_i)
    UB1_i   = nu_i / (pi^2 D),   UB2_i = zeta_i / D

Normal inputs:  sigma_i^2 w_i^2 / D <= S_i^tot <= sigma_i^2 nu_i / D.

Every bound in a report divides by the same D, the pooled variance of the
pick-freeze A and B blocks.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from dgsmkit.core.dgsm import DgsmSet, GradientSample, default_m_grid, dgsm_from_sample, gradient_sample
from dgsmkit.core.model import (
    DistributionKind,
    FdScheme,
    ModelSpec,
    counted,
    evaluate_batch,
    transform_points,
)
from dgsmkit.core.qmc import SamplePlan, sobol_points
from dgsmkit.core.variance import (
    ConstantModelError,
    check_variance,
    indices_from_sample,
    pick_freeze_sample,
    sample_variance,
)
from dgsmkit.utils.numeric import stable_mean

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
# nu_i below this fraction of D marks variable i as inert.
INERT_RTOL = 1e-14
M_TOLERANCE = 1e-3
TIGHT_RTOL = 1e-3

FLAG_INERT = "inert"
FLAG_TIGHT_UB2 = "tight_ub2"
FLAG_HEURISTIC_RANGE = "heuristic_range"


class BoundsError(Exception):
    """Raised when a bound cannot be computed for the given model or inputs."""
    pass


@dataclass
class EdgeSample:
    """f(x), and f(x) with x_i set to 1 and to 0, for every point and variable."""
    fx: np.ndarray  # (N,)
    f_one: np.ndarray  # (N, d)
    f_zero: np.ndarray  # (N, d)

    @property
    def lb1_integrals(self) -> np.ndarray:
        """E[(f(1,z) - f(0,z)) (f(1,z) + f(0,z) - 2 f(x))] per variable."""
        terms = (self.f_one - self.f_zero) * (self.f_one + self.f_zero - 2.0 * self.fx[:, None])
        return np.asarray(stable_mean(terms, axis=0))

    @property
    def a_integrals(self) -> np.ndarray:
        """A_i = E[f(1,z) - f(x)]."""
        return np.asarray(stable_mean(self.f_one - self.fx[:, None], axis=0))


@dataclass
class BoundSamples:
    """Cached model information for the lower bounds; gamma(m) needs no further evaluations."""
    gradients: GradientSample
    edges: EdgeSample

    @property
    def dimension(self) -> int:
        return self.gradients.X.shape[1]


def _require_uniform(model: ModelSpec, what: str) -> None:
    if not model.is_uniform:
        raise BoundsError(f"{what} requires Uniform01 inputs; '{model.name}' has {model.kind.value} inputs")


def edge_sample(
    model: ModelSpec,
    X: np.ndarray,
    fx: np.ndarray,
    threads: int = 1,
    block_size: int = 4096,
) -> EdgeSample:
    """Evaluate f with each coordinate pinned to 1 and to 0: 2Nd evaluations."""
    _require_uniform(model, "LB1")
    N, d = X.shape
    faces = np.repeat(X[None, :, :], 2 * d, axis=0)  # (2d, N, d)
    for i in range(d):
        faces[i, :, i] = 1.0
        faces[d + i, :, i] = 0.0
    values = evaluate_batch(model, faces.reshape(2 * d * N, d), threads, block_size).reshape(2 * d, N)
    return EdgeSample(fx=fx, f_one=values[:d].T, f_zero=values[d:].T)


def bound_samples(
    model: ModelSpec,
    plan: SamplePlan,
    scheme: FdScheme = "central",
    threads: int = 1,
    block_size: int = 4096,
) -> BoundSamples:
    """Gradients and face values on the plan's points."""
    _require_uniform(model, "lower bounds")
    grads = gradient_sample(model, plan, scheme, threads, block_size)
    edges = edge_sample(model, grads.X, grads.f, threads, block_size)
    return BoundSamples(gradients=grads, edges=edges)


def _sample_variance_of(values: np.ndarray, name: str) -> float:
    f0 = float(stable_mean(values))
    D = float(stable_mean((values - f0) ** 2))
    check_variance(D, float(stable_mean(values**2)), name)
    return D


def inert_mask(nu: np.ndarray, D: float) -> np.ndarray:
    return np.asarray(nu) < INERT_RTOL * D


def lb1_from_samples(samples: BoundSamples, nu: np.ndarray, D: float) -> np.ndarray:
    """LB1 per variable; inert variables (nu_i ~ 0) get 0."""
    if not D > 0:
        raise ConstantModelError(f"output variance is {D:.3g}")
    integral = samples.edges.lb1_integrals
    inert = inert_mask(nu, D)
    safe_nu = np.where(inert, 1.0, nu)
    return np.where(inert, 0.0, integral**2 / (4.0 * safe_nu * D))


def lower_bound_one(
    model: ModelSpec,
    plan: SamplePlan,
    D: float,
    nu: np.ndarray | None = None,
    scheme: FdScheme = "central",
    threads: int = 1,
    block_size: int = 4096,
) -> np.ndarray:
    """
    LB1 from the plan's points. nu is computed from the same points when not given.
    Example: lower_bound_one(g_function, SamplePlan(8, 2**14), D) -> zeros
    """
    _require_uniform(model, "LB1")
    if nu is None:
        samples = bound_samples(model, plan, scheme, threads, block_size)
        nu = np.asarray(samples.gradients.mean(samples.gradients.G**2))
    else:
        X = transform_points(model, sobol_points(plan))
        fx = evaluate_batch(model, X, threads, block_size)
        edges = edge_sample(model, X, fx, threads, block_size)
        samples = BoundSamples(GradientSample(X=X, f=fx, G=np.zeros_like(X)), edges)
    return lb1_from_samples(samples, np.asarray(nu, dtype=float), D)


def _gamma_values(a: np.ndarray, w: np.ndarray, m: float, D: float) -> np.ndarray:
    return (2.0 * m + 1.0) * (a - w) ** 2 / ((m + 1.0) ** 2 * D)


def gamma_from_samples(samples: BoundSamples, m: float, D: float) -> np.ndarray:
    """g(m) for every variable from cached samples."""
    if not m > 0:
        raise BoundsError(f"m must be > 0, got {m}")
    a = samples.edges.a_integrals
    w = samples.gradients.w(m + 1.0)
    numerator = (a - w) ** 2
    if not np.any(numerator > 0):
        return np.zeros_like(numerator)
    if not D > 0:
        raise ConstantModelError(f"output variance is {D:.3g}")
    return _gamma_values(a, w, m, D)


def gamma(
    model: ModelSpec,
    plan: SamplePlan,
    m: float,
    D: float | None = None,
    scheme: FdScheme = "central",
    threads: int = 1,
    block_size: int = 4096,
) -> np.ndarray:
    """
    g_i(m) for all variables; D defaults to the sample variance of f on the plan.
    Example: gamma(linear, SamplePlan(1, 4096), 3.745) -> ~[0.481]
    """
    samples = bound_samples(model, plan, scheme, threads, block_size)
    if D is None:
        a = samples.edges.a_integrals
        w = samples.gradients.w(m + 1.0)
        if not np.any((a - w) ** 2 > 0):
            return np.zeros(model.dimension)
        D = _sample_variance_of(samples.gradients.f, model.name)
    return gamma_from_samples(samples, m, D)


def _maximize_one(X: np.ndarray, G: np.ndarray, a: float, D: float, lo: float, hi: float) -> tuple[float, float]:
    def neg_gamma(m: float) -> float:
        w = float(stable_mean(X ** (m + 1.0) * G))
        return -float(_gamma_values(np.asarray(a), np.asarray(w), m, D))

    result = minimize_scalar(neg_gamma, bounds=(lo, hi), method="bounded", options={"xatol": M_TOLERANCE})
    return float(result.x), -float(result.fun)


def maximize_gamma_from_samples(
    samples: BoundSamples,
    D: float,
    m_range: tuple[float, float] = (0.1, 100.0),
    grid_points: int = 64,
    inert: np.ndarray | None = None,
) -> tuple[list[float | None], np.ndarray]:
    """
    (m*, LB2) per variable: the coarse log-grid maximum is refined by a bounded
    golden-section/parabolic search on the neighbouring grid interval.
    """
    grid = default_m_grid(m_range, grid_points)
    d = samples.dimension
    curve = np.stack([gamma_from_samples(samples, m, D) for m in grid])  # (M, d)
    a = samples.edges.a_integrals
    X, G = samples.gradients.X, samples.gradients.G

    m_star: list[float | None] = []
    lb2 = np.zeros(d)
    for i in range(d):
        column = curve[:, i]
        if (inert is not None and inert[i]) or not np.any(column > 0):
            m_star.append(None)
            continue
        j = int(np.argmax(column))
        lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
        m_i, value = _maximize_one(X[:, i], G[:, i], float(a[i]), D, lo, hi)
        if value < column[j]:
            m_i, value = float(grid[j]), float(column[j])
        logger.debug("m* search x%d: bracket [%.4g, %.4g] -> m*=%.4f LB2=%.6g", i + 1, lo, hi, m_i, value)
        m_star.append(m_i)
        lb2[i] = value
    return m_star, lb2


def maximize_gamma(
    model: ModelSpec,
    plan: SamplePlan,
    m_range: tuple[float, float] = (0.1, 100.0),
    D: float | None = None,
    grid_points: int = 64,
    scheme: FdScheme = "central",
    threads: int = 1,
    block_size: int = 4096,
) -> tuple[list[float | None], np.ndarray]:
    """
    (m*, LB2) per variable; m* is None when g is identically zero.
    Example: maximize_gamma(g_function, SamplePlan(1, 2**14)) -> ([~9.64], [...])
    """
    samples = bound_samples(model, plan, scheme, threads, block_size)
    if D is None:
        a = samples.edges.a_integrals
        if not np.any(a != 0) and not np.any(samples.gradients.G != 0):
            return [None] * model.dimension, np.zeros(model.dimension)
        D = _sample_variance_of(samples.gradients.f, model.name)
    return maximize_gamma_from_samples(samples, D, m_range, grid_points)


def lb_star(lb1: np.ndarray, lb2: np.ndarray) -> np.ndarray:
    """Componentwise max(LB1, LB2)."""
    lb1 = np.asarray(lb1, dtype=float)
    lb2 = np.asarray(lb2, dtype=float)
    if lb1.shape != lb2.shape:
        raise BoundsError(f"LB1 has shape {lb1.shape}, LB2 has shape {lb2.shape}")
    return np.maximum(lb1, lb2)


def upper_bounds(dgsm: DgsmSet, D: float) -> tuple[np.ndarray, np.ndarray]:
    """(UB1, UB2) = (nu / (pi^2 D), zeta / D)."""
    if dgsm.zeta is None:
        raise BoundsError("UB1/UB2 require Uniform01 inputs; use normal_bounds for Normal inputs")
    if not D > 0:
        raise ConstantModelError(f"output variance is {D:.3g}")
    return dgsm.nu / (np.pi**2 * D), dgsm.zeta / D


def empirical_range(sample: GradientSample) -> tuple[np.ndarray, np.ndarray]:
    """Sample min and max of |df/dx_i|. Not a rigorous c, C: the sample under-covers the extremes."""
    magnitude = np.abs(sample.G)
    return magnitude.min(axis=0), magnitude.max(axis=0)


def range_bounds(
    c: np.ndarray | list[float],
    C: np.ndarray | list[float],
    D: float,
    distribution: DistributionKind | str = DistributionKind.UNIFORM01,
    sigmas: np.ndarray | list[float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Bounds from c <= |df/dx_i| <= C: c^2/(12D)..C^2/(12D) for Uniform01 inputs,
    sigma_i^2 c^2/D..sigma_i^2 C^2/D for Normal inputs.
    """
    c = np.asarray(c, dtype=float)
    C = np.asarray(C, dtype=float)
    if c.shape != C.shape:
        raise BoundsError(f"c has shape {c.shape}, C has shape {C.shape}")
    if np.any(c < 0):
        raise BoundsError("c must be >= 0")
    bad = np.flatnonzero(c > C)
    if bad.size:
        raise BoundsError(f"c > C for variable {int(bad[0]) + 1}: {c[bad[0]]} > {C[bad[0]]}")
    if not D > 0:
        raise ConstantModelError(f"output variance is {D:.3g}")

    kind = DistributionKind(distribution)
    if kind == DistributionKind.UNIFORM01:
        return c**2 / (12.0 * D), C**2 / (12.0 * D)
    if sigmas is None:
        raise BoundsError("Normal range bounds need sigmas")
    s2 = np.asarray(sigmas, dtype=float) ** 2
    return s2 * c**2 / D, s2 * C**2 / D


def normal_bounds(
    dgsm: DgsmSet,
    sigmas: np.ndarray | list[float],
    D: float,
) -> tuple[np.ndarray, np.ndarray]:
    """(sigma^2 w^2 / D, sigma^2 nu / D); sigma_i = 0 gives (0, 0)."""
    if dgsm.w_normal is None:
        raise BoundsError("normal bounds require a DgsmSet computed for Normal inputs")
    if not D > 0:
        raise ConstantModelError(f"output variance is {D:.3g}")
    s2 = np.asarray(sigmas, dtype=float) ** 2
    if s2.shape != dgsm.nu.shape:
        raise BoundsError(f"{s2.size} sigmas for {dgsm.dimension} variables")
    return s2 * dgsm.w_normal**2 / D, s2 * dgsm.nu / D


@dataclass
class EvaluationLedger:
    """Function-evaluation counts by the N(3d+1) / N(d+1) cost model, plus what actually ran."""
    n: int
    d: int
    n_f_lb: int
    n_f_ub: int
    n_f_s: int
    n_f_first_order_extra: int
    n_f_lb_adjoint: int
    n_f_ub_adjoint: int
    model_calls: dict[str, int] = field(default_factory=dict)

    @classmethod
    def for_counts(cls, n: int, d: int, uniform: bool = True, model_calls: dict[str, int] | None = None):
        return cls(
            n=n,
            d=d,
            n_f_lb=n * (3 * d + 1) if uniform else n * (d + 1),
            n_f_ub=n * (d + 1),
            n_f_s=n * (d + 1),
            n_f_first_order_extra=n,
            n_f_lb_adjoint=n * (2 * d + 6) if uniform else 6 * n,
            n_f_ub_adjoint=6 * n,
            model_calls=dict(model_calls or {}),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "n_f_lb": self.n_f_lb,
            "n_f_ub": self.n_f_ub,
            "n_f_s": self.n_f_s,
            "n_f_first_order_extra": self.n_f_first_order_extra,
            "n_f_lb_adjoint": self.n_f_lb_adjoint,
            "n_f_ub_adjoint": self.n_f_ub_adjoint,
            "model_calls": dict(self.model_calls),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EvaluationLedger":
        return cls(**{**data, "model_calls": dict(data.get("model_calls", {}))})


def _opt(value: Any) -> float | None:
    return None if value is None else float(value)


@dataclass
class VariableBounds:
    """Everything the report states about one input (index is 1-based)."""
    index: int
    s_i: float
    s_i_tot: float
    mu: float
    nu: float
    zeta: float | None = None
    lb1: float | None = None
    lb2: float | None = None
    m_star: float | None = None
    lb_star: float | None = None
    ub1: float | None = None
    ub2: float | None = None
    w_normal: float | None = None
    lb_normal: float | None = None
    ub_normal: float | None = None
    range_lower: float | None = None
    range_upper: float | None = None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "s_i": self.s_i,
            "s_i_tot": self.s_i_tot,
            "mu": self.mu,
            "nu": self.nu,
            "zeta": self.zeta,
            "lb1": self.lb1,
            "lb2": self.lb2,
            "m_star": self.m_star,
            "lb_star": self.lb_star,
            "ub1": self.ub1,
            "ub2": self.ub2,
            "w_normal": self.w_normal,
            "lb_normal": self.lb_normal,
            "ub_normal": self.ub_normal,
            "range_lower": self.range_lower,
            "range_upper": self.range_upper,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "VariableBounds":
        fields_ = {k: _opt(data.get(k)) for k in (
            "zeta", "lb1", "lb2", "m_star", "lb_star", "ub1", "ub2",
            "w_normal", "lb_normal", "ub_normal", "range_lower", "range_upper",
        )}
        return cls(
            index=int(data["index"]),
            s_i=float(data["s_i"]),
            s_i_tot=float(data["s_i_tot"]),
            mu=float(data["mu"]),
            nu=float(data["nu"]),
            flags=list(data.get("flags", [])),
            **fields_,
        )


# Report quantity names -> VariableBounds attributes.
QUANTITY_FIELDS = {
    "s": "s_i",
    "s_tot": "s_i_tot",
    "mu": "mu",
    "nu": "nu",
    "zeta": "zeta",
    "lb1": "lb1",
    "lb2": "lb2",
    "lb_star": "lb_star",
    "ub1": "ub1",
    "ub2": "ub2",
    "m_star": "m_star",
    "w_normal": "w_normal",
    "lb_normal": "lb_normal",
    "ub_normal": "ub_normal",
}


@dataclass
class BoundsReport:
    """Sobol' indices, DGSM and every bound for one model and one point set."""
    function: str
    distribution: str
    dimension: int
    variance: float
    mean: float
    count: int
    seed: int
    replicate: int
    m_range: tuple[float, float]
    variables: list[VariableBounds]
    ledger: EvaluationLedger
    ranking: dict[str, Any] = field(default_factory=dict)
    reference: dict[str, Any] | None = None
    replicates: dict[str, Any] | None = None  # mean/stderr over shifted replicates
    schema_version: int = SCHEMA_VERSION

    def value(self, quantity: str, variable: int | None = None) -> float | None:
        """A scalar from the report; variable is 1-based and ignored for 'd'."""
        if quantity == "d":
            return self.variance
        if quantity not in QUANTITY_FIELDS:
            raise KeyError(f"unknown quantity '{quantity}'")
        if variable is None or not 1 <= variable <= self.dimension:
            raise KeyError(f"variable must be in 1..{self.dimension}, got {variable}")
        return getattr(self.variables[variable - 1], QUANTITY_FIELDS[quantity])

    def column(self, quantity: str) -> list[float | None]:
        return [self.value(quantity, i) for i in range(1, self.dimension + 1)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "function": self.function,
            "distribution": self.distribution,
            "dimension": self.dimension,
            "variance": self.variance,
            "mean": self.mean,
            "count": self.count,
            "seed": self.seed,
            "replicate": self.replicate,
            "m_range": list(self.m_range),
            "variables": [v.to_dict() for v in self.variables],
            "ledger": self.ledger.to_dict(),
            "ranking": self.ranking,
            "reference": self.reference,
            "replicates": self.replicates,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BoundsReport":
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise BoundsError(f"unsupported report schema_version {version}")
        return cls(
            function=data["function"],
            distribution=data["distribution"],
            dimension=int(data["dimension"]),
            variance=float(data["variance"]),
            mean=float(data["mean"]),
            count=int(data["count"]),
            seed=int(data["seed"]),
            replicate=int(data["replicate"]),
            m_range=(float(data["m_range"][0]), float(data["m_range"][1])),
            variables=[VariableBounds.from_dict(v) for v in data["variables"]],
            ledger=EvaluationLedger.from_dict(data["ledger"]),
            ranking=data.get("ranking") or {},
            reference=data.get("reference"),
            replicates=data.get("replicates"),
            schema_version=version,
        )


@dataclass
class ReportOptions:
    """Knobs for assemble_report."""
    m_range: tuple[float, float] = (0.1, 100.0)
    m_grid_points: int = 64
    scheme: FdScheme = "central"
    threads: int = 1
    block_size: int = 4096
    # User-supplied derivative ranges; when absent the sample min/max is used and flagged.
    range_c: list[float] | None = None
    range_C: list[float] | None = None
    empirical_range: bool = True


def _descending(values: list[float | None]) -> list[int]:
    keyed = [(-(v if v is not None else -np.inf), i + 1) for i, v in enumerate(values)]
    return [i for _, i in sorted(keyed)]


def rank_variables(variables: list[VariableBounds], uniform: bool = True) -> dict[str, Any]:
    """Descending variable order per quantity and whether all orders agree."""
    keys = ("s_i_tot", "lb2", "lb_star", "ub1", "ub2") if uniform else ("s_i_tot", "lb_normal", "ub_normal")
    orders = {key: _descending([getattr(v, key) for v in variables]) for key in keys}
    first = orders["s_i_tot"]
    return {"orders": orders, "ranking_agrees": all(order == first for order in orders.values())}


def assemble_report(
    model: ModelSpec,
    plan: SamplePlan,
    options: ReportOptions | None = None,
) -> BoundsReport:
    """
    Run variance, DGSM and bound estimation on coordinated point sets.
    Block A of the pick-freeze sample carries the DGSM and the face
    evaluations, so f(A) is computed once and every bound shares one D.
    """
    options = options or ReportOptions()
    d, N = model.dimension, plan.count
    if plan.dimension != d:
        raise BoundsError(f"plan dimension {plan.dimension} != model dimension {d}")
    tracked, counter = counted(model)
    threads, block = options.threads, options.block_size

    pf = pick_freeze_sample(tracked, plan, threads, block)
    f0, D = sample_variance(pf, model.name)
    first, total = indices_from_sample(pf, D)

    grads = gradient_sample(
        tracked, plan, options.scheme, threads, block, unit_points=pf.unit_A, values=pf.fA
    )
    grid = default_m_grid(options.m_range, options.m_grid_points) if model.is_uniform else np.empty(0)
    dgsm = dgsm_from_sample(model, grads, grid, options.scheme)
    inert = inert_mask(dgsm.nu, D)

    records = [
        VariableBounds(
            index=i + 1,
            s_i=float(first[i]),
            s_i_tot=float(total[i]),
            mu=float(dgsm.mu[i]),
            nu=float(dgsm.nu[i]),
            flags=[FLAG_INERT] if inert[i] else [],
        )
        for i in range(d)
    ]

    if model.is_uniform:
        edges = edge_sample(tracked, pf.A, pf.fA, threads, block)
        samples = BoundSamples(gradients=grads, edges=edges)
        lb1 = lb1_from_samples(samples, dgsm.nu, D)
        m_star, lb2 = maximize_gamma_from_samples(samples, D, options.m_range, options.m_grid_points, inert)
        lbs = lb_star(lb1, lb2)
        ub1, ub2 = upper_bounds(dgsm, D)
        for i, rec in enumerate(records):
            rec.zeta = float(dgsm.zeta[i])
            if inert[i]:
                rec.lb1 = rec.lb2 = rec.lb_star = rec.ub1 = rec.ub2 = 0.0
                continue
            rec.lb1, rec.lb2, rec.lb_star = float(lb1[i]), float(lb2[i]), float(lbs[i])
            rec.m_star = m_star[i]
            rec.ub1, rec.ub2 = float(ub1[i]), float(ub2[i])
            if abs(rec.ub2 - rec.s_i_tot) <= TIGHT_RTOL * max(rec.s_i_tot, 1e-12):
                rec.flags.append(FLAG_TIGHT_UB2)
    else:
        lbn, ubn = normal_bounds(dgsm, model.sigmas, D)
        for i, rec in enumerate(records):
            rec.w_normal = float(dgsm.w_normal[i])
            rec.lb_normal, rec.ub_normal = (0.0, 0.0) if inert[i] else (float(lbn[i]), float(ubn[i]))

    _attach_range_bounds(model, records, grads, D, options)

    ledger = EvaluationLedger.for_counts(N, d, model.is_uniform, counter.to_dict())
    logger.debug("Report for %s: D=%.6g, model calls %s", model.name, D, ledger.model_calls)
    return BoundsReport(
        function=model.name,
        distribution=model.kind.value,
        dimension=d,
        variance=D,
        mean=f0,
        count=N,
        seed=plan.seed,
        replicate=plan.replicate,
        m_range=(float(options.m_range[0]), float(options.m_range[1])),
        variables=records,
        ledger=ledger,
        ranking=rank_variables(records, model.is_uniform),
    )


def _attach_range_bounds(
    model: ModelSpec,
    records: list[VariableBounds],
    grads: GradientSample,
    D: float,
    options: ReportOptions,
) -> None:
    if options.range_c is not None or options.range_C is not None:
        if options.range_c is None or options.range_C is None:
            raise BoundsError("range bounds need both c and C")
        c, C = np.asarray(options.range_c, dtype=float), np.asarray(options.range_C, dtype=float)
        if c.shape != (model.dimension,) or C.shape != (model.dimension,):
            raise BoundsError(f"c and C need {model.dimension} entries each")
        heuristic = False
    elif options.empirical_range:
        c, C = empirical_range(grads)
        heuristic = True
        logger.info("Range bounds for %s use sample min/max of |df/dx|; they are not rigorous", model.name)
    else:
        return
    try:
        lower, upper = range_bounds(c, C, D, model.kind, None if model.is_uniform else model.sigmas)
    except BoundsError as e:
        raise BoundsError(f"range bounds for '{model.name}': {e}") from e
    for i, rec in enumerate(records):
        rec.range_lower, rec.range_upper = float(lower[i]), float(upper[i])
        if heuristic:
            rec.flags.append(FLAG_HEURISTIC_RANGE)
