"""
Hartmann 6-dimensional function with constants loaded from data/hartmann6.yml.
"""

import logging
from functools import lru_cache
from pathlib import Path

import numpy as np
import yaml

from dgsmkit.core.model import ModelError, ModelSpec
from dgsmkit.functions.base import TestFunction

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"


@lru_cache(maxsize=None)
def load_hartmann_constants(path: Path = DATA_DIR / "hartmann6.yml") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(c, alpha, p) with shapes (4,), (4, 6), (4, 6)."""
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f)
    c = np.asarray(data["c"], dtype=float)
    alpha = np.asarray(data["alpha"], dtype=float)
    p = np.asarray(data["p"], dtype=float)
    if alpha.shape != p.shape or alpha.shape[0] != c.size:
        raise ModelError(f"{path}: inconsistent Hartmann constant shapes {c.shape}, {alpha.shape}, {p.shape}")
    logger.debug("Loaded Hartmann constants from %s", path)
    return c, alpha, p


def make_hartmann6() -> TestFunction:
    """f(x) = -sum_k c_k exp(-sum_j alpha_kj (x_j - p_kj)^2). No closed-form sensitivities."""
    c, alpha, p = load_hartmann_constants()

    def terms(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        diff = X[:, None, :] - p[None, :, :]  # (n, 4, 6)
        return diff, c * np.exp(-np.sum(alpha * diff**2, axis=2))  # (n, 4)

    def evaluator(X: np.ndarray) -> np.ndarray:
        return -terms(X)[1].sum(axis=1)

    def grad(X: np.ndarray) -> np.ndarray:
        diff, weighted = terms(X)
        return np.einsum("nk,nkj->nj", weighted, 2.0 * alpha * diff)

    model = ModelSpec(alpha.shape[1], evaluator, grad, name="hartmann6")
    return TestFunction(
        name="hartmann6",
        model=model,
        params={},
        analytic=None,
        description="6-d Hartmann, standard constants",
    )
