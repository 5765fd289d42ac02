"""
Block-parallel evaluation of vectorized callables.

Points are cut into fixed-size blocks; blocks are mapped through a thread pool
and the outputs are stitched back in block order, so the result does not depend
on the number of workers.
"""

import logging
import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

logger = logging.getLogger(__name__)


def resolve_threads(threads: int) -> int:
    """Map the 0 = auto convention to a concrete worker count."""
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def evaluate_blocks(
    fn: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    threads: int = 1,
    block_size: int = 4096,
) -> np.ndarray:
    """
    Apply fn to row blocks of points and concatenate the outputs in order.
    Example: values = evaluate_blocks(model.evaluator, X, threads=4)
    """
    n = points.shape[0]
    if n == 0:
        return fn(points)

    workers = resolve_threads(threads)
    starts = list(range(0, n, block_size))
    if workers == 1 or len(starts) == 1:
        return np.concatenate([fn(points[s:s + block_size]) for s in starts], axis=0)

    logger.debug("Evaluating %d rows in %d blocks on %d threads", n, len(starts), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outputs = list(pool.map(lambda s: fn(points[s:s + block_size]), starts))
    return np.concatenate(outputs, axis=0)
