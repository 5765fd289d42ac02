"""
Evaluable model abstraction: input distributions, batch evaluation and
partial derivatives (analytic, or finite differences when no gradient is given).

Evaluators and gradients follow a numpy batch contract: they receive an (n, d)
array of points and return an (n,) array of values, or an (n, d) array of
partial derivatives. Both must be stateless so blocks can be evaluated from
several threads.
"""

import logging
import threading
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Literal

import numpy as np
from scipy.special import ndtri

from dgsmkit.utils.parallel import evaluate_blocks

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
CENTRAL_STEP = EPS ** (1.0 / 3.0)
FORWARD_STEP = EPS ** 0.5
# Keeps the inverse normal CDF finite when a shifted point lands exactly on 0.
UNIT_CLIP = 1e-15

FdScheme = Literal["central", "forward"]


class ModelError(Exception):
    """Raised when a model definition is invalid."""
    pass


class DimensionMismatchError(ModelError):
    """Raised when points or gradients do not have d coordinates."""
    pass


class DomainError(ModelError):
    """Raised when a point lies outside the input domain."""
    pass


class NonFiniteValueError(ModelError):
    """Raised when the model or its derivative returns NaN/inf."""

    def __init__(self, message: str, point: np.ndarray | None = None):
        self.point = None if point is None else np.array(point, dtype=float)
        if self.point is not None:
            message = f"{message} at point {self.point.tolist()}"
        super().__init__(message)


class DistributionKind(str, Enum):
    UNIFORM01 = "uniform01"
    NORMAL = "normal"


@dataclass(frozen=True)
class DistributionSpec:
    """Marginal distribution of one input. Uniform01 carries no parameters."""
    kind: DistributionKind = DistributionKind.UNIFORM01
    mean: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        if self.kind == DistributionKind.UNIFORM01:
            if self.mean is not None or self.sigma is not None:
                raise ModelError("Uniform01 inputs take no mean/sigma")
        elif self.kind == DistributionKind.NORMAL:
            if self.sigma is None or not self.sigma > 0:
                raise ModelError(f"Normal inputs require sigma > 0, got {self.sigma}")
            if self.mean is None:
                object.__setattr__(self, "mean", 0.0)
        else:
            raise ModelError(f"Unknown distribution kind: {self.kind}")

    @classmethod
    def uniform(cls) -> "DistributionSpec":
        return cls(DistributionKind.UNIFORM01)

    @classmethod
    def normal(cls, mean: float = 0.0, sigma: float = 1.0) -> "DistributionSpec":
        return cls(DistributionKind.NORMAL, mean=float(mean), sigma=float(sigma))

    def to_dict(self) -> dict[str, Any]:
        if self.kind == DistributionKind.UNIFORM01:
            return {"kind": self.kind.value}
        return {"kind": self.kind.value, "mean": self.mean, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DistributionSpec":
        kind = DistributionKind(data.get("kind", DistributionKind.UNIFORM01.value))
        if kind == DistributionKind.UNIFORM01:
            return cls.uniform()
        return cls.normal(data.get("mean", 0.0), data["sigma"])


@dataclass(frozen=True)
class ModelSpec:
    """
    Scalar model of d independent inputs.
    Example: ModelSpec(2, lambda X: X[:, 0] + X[:, 1])
    """
    dimension: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    domain: tuple[DistributionSpec, ...] = field(default=())
    name: str = "model"

    def __post_init__(self):
        if not isinstance(self.dimension, (int, np.integer)) or self.dimension < 1:
            raise ModelError(f"dimension must be a positive integer, got {self.dimension}")
        if not self.domain:
            object.__setattr__(self, "domain", tuple(DistributionSpec.uniform() for _ in range(self.dimension)))
        else:
            object.__setattr__(self, "domain", tuple(self.domain))
        if len(self.domain) != self.dimension:
            raise DimensionMismatchError(
                f"domain has {len(self.domain)} entries for a {self.dimension}-dimensional model"
            )
        kinds = {spec.kind for spec in self.domain}
        if len(kinds) > 1:
            raise ModelError("mixed Uniform01/Normal inputs in one model are not supported")

    @property
    def kind(self) -> DistributionKind:
        return self.domain[0].kind

    @property
    def is_uniform(self) -> bool:
        return self.kind == DistributionKind.UNIFORM01

    @property
    def means(self) -> np.ndarray:
        return np.array([spec.mean if spec.mean is not None else 0.5 for spec in self.domain])

    @property
    def sigmas(self) -> np.ndarray:
        if self.is_uniform:
            return np.full(self.dimension, np.sqrt(1.0 / 12.0))
        return np.array([spec.sigma for spec in self.domain])

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None

    def with_domain(self, domain: Sequence[DistributionSpec]) -> "ModelSpec":
        return replace(self, domain=tuple(domain))

    @classmethod
    def from_pointwise(
        cls,
        fn: Callable[[np.ndarray], float],
        dimension: int,
        gradient: Callable[[np.ndarray], Sequence[float]] | None = None,
        domain: Sequence[DistributionSpec] = (),
        name: str = "model",
    ) -> "ModelSpec":
        """Wrap a scalar-per-point callable into the batch contract."""

        def batch_eval(X: np.ndarray) -> np.ndarray:
            return np.array([fn(x) for x in X], dtype=float)

        batch_grad = None
        if gradient is not None:
            def batch_grad(X: np.ndarray) -> np.ndarray:
                return np.array([gradient(x) for x in X], dtype=float).reshape(X.shape[0], dimension)

        return cls(dimension, batch_eval, batch_grad, tuple(domain), name)


def _as_points(model: ModelSpec, points: np.ndarray) -> np.ndarray:
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.dimension:
        raise DimensionMismatchError(
            f"expected points with {model.dimension} coordinates, got shape {np.shape(points)}"
        )
    return X


def _check_domain(model: ModelSpec, X: np.ndarray) -> None:
    if not model.is_uniform:
        return
    outside = (X < 0.0) | (X > 1.0)
    if outside.any():
        row = int(np.argwhere(outside.any(axis=1))[0, 0])
        raise DomainError(f"point {X[row].tolist()} lies outside the unit cube")


def _check_finite(values: np.ndarray, X: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        rows = bad if bad.ndim == 1 else bad.any(axis=1)
        row = int(np.argwhere(rows)[0, 0])
        raise NonFiniteValueError(f"non-finite {what}", X[row])


def transform_points(model: ModelSpec, unit_points: np.ndarray) -> np.ndarray:
    """
    Map points of the unit cube to the model's input space.
    Normal inputs go through the inverse normal CDF; uniform inputs are unchanged.
    """
    U = np.asarray(unit_points, dtype=float)
    if model.is_uniform:
        return U
    Z = ndtri(np.clip(U, UNIT_CLIP, 1.0 - UNIT_CLIP))
    return model.means + model.sigmas * Z


def evaluate_batch(
    model: ModelSpec,
    points: np.ndarray,
    threads: int = 1,
    block_size: int = 4096,
) -> np.ndarray:
    """Evaluate the model on an (n, d) array; aborts on the first non-finite value."""
    X = _as_points(model, points)
    _check_domain(model, X)
    values = np.asarray(evaluate_blocks(model.evaluator, X, threads, block_size), dtype=float).reshape(-1)
    if values.shape[0] != X.shape[0]:
        raise DimensionMismatchError(f"evaluator returned {values.shape[0]} values for {X.shape[0]} points")
    _check_finite(values, X, "model output")
    return values


def evaluate(model: ModelSpec, point: Sequence[float] | np.ndarray) -> float:
    """
    Evaluate f at a single point.
    Example: evaluate(model, [0.5, 0.5]) -> 1.0 for f = x1 + x2
    """
    x = np.asarray(point, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"expected a single point, got shape {x.shape}")
    return float(evaluate_batch(model, x[None, :])[0])


def fd_step(x: np.ndarray, scheme: FdScheme = "central") -> np.ndarray:
    """Step h_i = max(1, |x_i|) * eps^(1/3) (central) or eps^(1/2) (forward)."""
    base = CENTRAL_STEP if scheme == "central" else FORWARD_STEP
    return np.maximum(1.0, np.abs(x)) * base


def gradient_cost(model: ModelSpec, scheme: FdScheme = "central") -> int:
    """Extra evaluator rows per point spent on derivatives (upper bound for central)."""
    if model.has_gradient:
        return 0
    return model.dimension if scheme == "forward" else 2 * model.dimension


def _fd_gradient(
    model: ModelSpec,
    X: np.ndarray,
    scheme: FdScheme,
    values: np.ndarray | None,
    threads: int,
    block_size: int,
) -> np.ndarray:
    n, d = X.shape
    G = np.empty((n, d))

    def f(P: np.ndarray) -> np.ndarray:
        out = np.asarray(evaluate_blocks(model.evaluator, P, threads, block_size), dtype=float).reshape(-1)
        _check_finite(out, P, "model output")
        return out

    f0 = values
    for i in range(d):
        x = X[:, i]
        h = fd_step(x, scheme)
        if model.is_uniform:
            lo = x < h if scheme == "central" else np.zeros(n, dtype=bool)
            hi = x > 1.0 - h
        else:
            lo = hi = np.zeros(n, dtype=bool)

        if scheme == "forward":
            if f0 is None:
                f0 = f(X)
            Xa = X.copy()
            Xa[:, i] = np.where(hi, x - h, x + h)
            fa = f(Xa)
            spacing = Xa[:, i] - x
            G[:, i] = (fa - f0) / spacing
            continue

        Xa = X.copy()
        Xb = X.copy()
        Xa[:, i] = np.where(hi, x - h, x + h)
        Xb[:, i] = np.where(lo, x + 2 * h, np.where(hi, x - 2 * h, x - h))
        fa = f(Xa)
        fb = f(Xb)
        grad = (fa - fb) / (Xa[:, i] - Xb[:, i])

        edge = lo | hi
        if edge.any():
            fe = f0[edge] if f0 is not None else f(X[edge])
            one_sided = (-3.0 * fe + 4.0 * fa[edge] - fb[edge]) / (2.0 * h[edge])
            grad[edge] = np.where(hi[edge], -one_sided, one_sided)
        G[:, i] = grad
    return G


def gradient_batch(
    model: ModelSpec,
    points: np.ndarray,
    scheme: FdScheme = "central",
    values: np.ndarray | None = None,
    threads: int = 1,
    block_size: int = 4096,
) -> np.ndarray:
    """
    Partial derivatives at each row of points, shape (n, d).
    Uses the analytic gradient when the model has one, otherwise finite
    differences; near the faces of the unit cube one-sided 3-point stencils
    replace the central stencil. values, when given, must be f(points).
    """
    X = _as_points(model, points)
    _check_domain(model, X)
    if model.has_gradient:
        G = np.asarray(evaluate_blocks(model.gradient, X, threads, block_size), dtype=float)
        if G.shape != X.shape:
            raise DimensionMismatchError(f"gradient returned shape {G.shape} for points of shape {X.shape}")
    else:
        G = _fd_gradient(model, X, scheme, values, threads, block_size)
    _check_finite(G, X, "derivative")
    return G


def gradient(model: ModelSpec, point: Sequence[float] | np.ndarray, scheme: FdScheme = "central") -> np.ndarray:
    """
    Gradient at a single point.
    Example: gradient(model, [0.3]) -> [0.6] for f = x1**2
    """
    x = np.asarray(point, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"expected a single point, got shape {x.shape}")
    return gradient_batch(model, x[None, :], scheme=scheme)[0]


def fd_gradient_batch(model: ModelSpec, points: np.ndarray, scheme: FdScheme = "central") -> np.ndarray:
    """Finite-difference gradient even when an analytic gradient exists."""
    return gradient_batch(replace(model, gradient=None), points, scheme=scheme)


def check_gradient(model: ModelSpec, points: np.ndarray, rtol: float = 1e-5, atol: float = 1e-8) -> float:
    """
    Compare the analytic gradient against central finite differences.
    Returns the largest scaled error |g - g_fd| / (atol + rtol * |g|); <= 1 means agreement.
    """
    if not model.has_gradient:
        raise ModelError(f"model '{model.name}' has no analytic gradient to check")
    X = _as_points(model, points)
    analytic = gradient_batch(model, X)
    numeric = fd_gradient_batch(model, X)
    scaled = np.abs(analytic - numeric) / (atol + rtol * np.abs(analytic))
    worst = float(scaled.max()) if scaled.size else 0.0
    logger.debug("Gradient check for %s on %d points: worst scaled error %.3g", model.name, X.shape[0], worst)
    return worst


def restrict(model: ModelSpec, active: Sequence[int], fixed: Sequence[float] | np.ndarray) -> ModelSpec:
    """
    Freeze the inputs not listed in active (0-based) at the given full-length values.
    Example: restrict(hartmann, [0, 1, 2], np.full(6, 0.5)) -> 3-dimensional model
    """
    active = [int(i) for i in active]
    base = np.asarray(fixed, dtype=float)
    if base.shape != (model.dimension,):
        raise DimensionMismatchError(f"fixed must have {model.dimension} values, got shape {base.shape}")
    if not active or len(set(active)) != len(active) or min(active) < 0 or max(active) >= model.dimension:
        raise ModelError(f"invalid active index set {active} for dimension {model.dimension}")

    def lift(X: np.ndarray) -> np.ndarray:
        full = np.tile(base, (X.shape[0], 1))
        full[:, active] = X
        return full

    def evaluator(X: np.ndarray) -> np.ndarray:
        return model.evaluator(lift(X))

    grad = None
    if model.gradient is not None:
        def grad(X: np.ndarray) -> np.ndarray:
            return model.gradient(lift(X))[:, active]

    domain = tuple(model.domain[i] for i in active)
    return ModelSpec(len(active), evaluator, grad, domain, f"{model.name}[{','.join(str(i + 1) for i in active)}]")


@dataclass
class CallCounter:
    """Rows passed to a model's evaluator and gradient."""
    evaluator_rows: int = 0
    gradient_rows: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, evaluator_rows: int = 0, gradient_rows: int = 0) -> None:
        with self._lock:
            self.evaluator_rows += evaluator_rows
            self.gradient_rows += gradient_rows

    def to_dict(self) -> dict[str, int]:
        return {"evaluator_rows": self.evaluator_rows, "gradient_rows": self.gradient_rows}


def counted(model: ModelSpec) -> tuple[ModelSpec, CallCounter]:
    """A copy of model whose evaluator and gradient calls are tallied."""
    counter = CallCounter()

    def evaluator(X: np.ndarray) -> np.ndarray:
        counter.add(evaluator_rows=X.shape[0])
        return model.evaluator(X)

    grad = None
    if model.gradient is not None:
        def grad(X: np.ndarray) -> np.ndarray:
            counter.add(gradient_rows=X.shape[0])
            return model.gradient(X)

    return replace(model, evaluator=evaluator, gradient=grad), counter
