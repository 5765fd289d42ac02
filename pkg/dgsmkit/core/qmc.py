"""
Sobol' low-discrepancy point sets and randomly shifted replicates.

Index convention (frozen): the all-zeros point of the sequence is skipped, so a
plan of N points holds sequence indices 1..N in Gray-code order. For d = 1 the
first four points are 0.5, 0.75, 0.25, 0.375.

Direction numbers come from scipy's vendored Joe-Kuo table (21201 dimensions).
A custom table in the Joe-Kuo text format can be attached to a plan instead:

    d  s  a  m_i
    2  1  0  1
    3  2  1  1 3
    ...

one row per dimension starting at 2 (dimension 1 is van der Corput); s is the
degree of the primitive polynomial, a encodes its inner coefficients and
m_1..m_s are the initial direction integers.
"""

import logging
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import qmc

logger = logging.getLogger(__name__)

SCIPY_MAX_DIMENSION = 21201
BITS = 30
SHIFT_STREAM_PRIMARY = 0
SHIFT_STREAM_PAIRED = 1


class SamplePlanError(Exception):
    """Raised when a sample plan is invalid or unsupported."""
    pass


@dataclass(frozen=True)
class DirectionNumbers:
    """Direction-number table: per dimension (degree s, coefficients a, initial m_1..m_s)."""
    rows: tuple[tuple[int, int, tuple[int, ...]], ...]

    @property
    def max_dimension(self) -> int:
        return len(self.rows) + 1


def load_direction_numbers(path: Path | str) -> DirectionNumbers:
    """Parse a Joe-Kuo format direction-number file."""
    path = Path(path)
    rows: list[tuple[int, int, tuple[int, ...]]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts or not parts[0].isdigit():
                continue  # header or blank
            values = [int(p) for p in parts]
            if len(values) < 4:
                raise SamplePlanError(f"{path}:{lineno}: expected 'd s a m_1..m_s'")
            dim, s, a, m = values[0], values[1], values[2], tuple(values[3:])
            if dim != len(rows) + 2:
                raise SamplePlanError(f"{path}:{lineno}: dimensions must be consecutive from 2, got {dim}")
            if len(m) != s:
                raise SamplePlanError(f"{path}:{lineno}: degree {s} needs {s} initial direction integers")
            for k, mk in enumerate(m, start=1):
                if mk % 2 == 0 or mk >= 2**k:
                    raise SamplePlanError(f"{path}:{lineno}: m_{k}={mk} must be odd and below 2^{k}")
            rows.append((s, a, m))
    if not rows:
        raise SamplePlanError(f"{path}: no direction numbers found")
    logger.debug("Loaded %d direction-number rows from %s", len(rows), path)
    return DirectionNumbers(tuple(rows))


def _direction_integers(table: DirectionNumbers, dimension: int) -> np.ndarray:
    """V[j, k] = m_k << (BITS - k) for dimension j and bit k = 1..BITS."""
    V = np.zeros((dimension, BITS), dtype=np.int64)
    V[0] = [1 << (BITS - k) for k in range(1, BITS + 1)]
    for j in range(1, dimension):
        s, a, m_init = table.rows[j - 1]
        m = list(m_init)
        for k in range(s, BITS):
            new = m[k - s] ^ (m[k - s] << s)
            for r in range(1, s):
                if (a >> (s - 1 - r)) & 1:
                    new ^= m[k - r] << r
            m.append(new)
        V[j] = [m[k - 1] << (BITS - k) for k in range(1, BITS + 1)]
    return V


def _gray_code_points(table: DirectionNumbers, dimension: int, start: int, count: int) -> np.ndarray:
    V = _direction_integers(table, dimension)
    index = np.arange(start, start + count, dtype=np.int64)
    gray = index ^ (index >> 1)
    X = np.zeros((count, dimension), dtype=np.int64)
    for k in range(BITS):
        bit = ((gray >> k) & 1).astype(bool)
        X[bit] ^= V[:, k]
    return X / float(1 << BITS)


@dataclass(frozen=True)
class SamplePlan:
    """
    Deterministic QMC point set: N consecutive Sobol' points in d dimensions,
    optionally rotated modulo 1 by replicate_shift.
    """
    dimension: int
    count: int
    replicate_shift: tuple[float, ...] | None = None
    seed: int = 0
    replicate: int = 0
    direction_numbers: DirectionNumbers | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise SamplePlanError(f"dimension must be >= 1, got {self.dimension}")
        if self.count < 1:
            raise SamplePlanError(f"count must be >= 1, got {self.count}")
        if self.dimension > self.max_dimension:
            raise SamplePlanError(
                f"dimension {self.dimension} exceeds the direction-number table ({self.max_dimension})"
            )
        if self.count + 1 > 2**BITS:
            raise SamplePlanError(f"count {self.count} exceeds 2^{BITS} - 1 points")
        if self.replicate_shift is not None:
            shift = tuple(float(s) for s in self.replicate_shift)
            if len(shift) != self.dimension:
                raise SamplePlanError(f"shift has {len(shift)} entries for dimension {self.dimension}")
            if any(not (0.0 <= s < 1.0) for s in shift):
                raise SamplePlanError("shift coordinates must lie in [0, 1)")
            object.__setattr__(self, "replicate_shift", shift)
        if self.count & (self.count - 1):
            logger.debug("Sample count %d is not a power of two", self.count)

    @property
    def max_dimension(self) -> int:
        if self.direction_numbers is not None:
            return self.direction_numbers.max_dimension
        return SCIPY_MAX_DIMENSION

    def with_count(self, count: int) -> "SamplePlan":
        return replace(self, count=count)

    def paired(self) -> "SamplePlan":
        """
        The 2d-dimensional plan for the A/B pick-freeze blocks.
        Its first d columns coincide with this plan's points.
        """
        shift = None
        if self.replicate_shift is not None:
            extra = shift_vector(self.seed, self.replicate, self.dimension, stream=SHIFT_STREAM_PAIRED)
            shift = self.replicate_shift + tuple(extra)
        return replace(self, dimension=2 * self.dimension, replicate_shift=shift)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "count": self.count,
            "replicate_shift": None if self.replicate_shift is None else list(self.replicate_shift),
            "seed": self.seed,
            "replicate": self.replicate,
        }


def shift_vector(seed: int, replicate: int, dimension: int, stream: int = SHIFT_STREAM_PRIMARY) -> np.ndarray:
    """Pseudo-random shift in [0,1)^d that depends only on (seed, replicate, stream)."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, replicate, stream]))
    return rng.random(dimension)


def sobol_points(plan: SamplePlan) -> np.ndarray:
    """
    N x d matrix of Sobol' points in [0,1)^d, skipping the all-zeros point,
    shifted modulo 1 when the plan carries a replicate shift.
    """
    if plan.direction_numbers is not None:
        points = _gray_code_points(plan.direction_numbers, plan.dimension, 1, plan.count)
    else:
        engine = qmc.Sobol(d=plan.dimension, scramble=False, bits=BITS)
        engine.fast_forward(1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            points = engine.random(plan.count)

    if plan.replicate_shift is not None:
        points = np.mod(points + np.asarray(plan.replicate_shift), 1.0)
        # Rounding in the sum can produce exactly 1.0.
        points[points >= 1.0] = 0.0
    logger.debug("Generated %d x %d Sobol' points (replicate %d)", plan.count, plan.dimension, plan.replicate)
    return points


def replicate_plans(dimension: int, count: int, K: int, seed: int) -> list[SamplePlan]:
    """
    K randomly shifted plans; the shift of replicate k depends only on (seed, k).
    Example: plans = replicate_plans(8, 1024, 25, seed=7)
    """
    if K < 1:
        raise SamplePlanError(f"K must be >= 1, got {K}")
    if seed < 0:
        raise SamplePlanError(f"seed must be non-negative, got {seed}")
    return [
        SamplePlan(dimension, count, tuple(shift_vector(seed, k, dimension)), seed=seed, replicate=k)
        for k in range(K)
    ]


def l2_star_discrepancy(points: np.ndarray) -> float:
    """L2-star discrepancy of a point set in [0,1]^d (Warnock's formula)."""
    X = np.asarray(points, dtype=float)
    n, d = X.shape
    term1 = 3.0 ** (-d)
    term2 = np.prod((1.0 - X**2) / 2.0, axis=1).sum() * 2.0 / n
    pair = np.ones((n, n))
    for j in range(d):
        col = X[:, j]
        pair *= 1.0 - np.maximum.outer(col, col)
    term3 = pair.sum() / n**2
    return float(np.sqrt(max(term1 - term2 + term3, 0.0)))
