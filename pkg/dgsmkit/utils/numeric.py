"""
Deterministic reductions.
"""

import math

import numpy as np

REDUCTION_BLOCK = 1024


def stable_sum(values: np.ndarray, axis: int = 0) -> np.ndarray | float:
    """
    Sum along axis in fixed blocks, combining block sums with math.fsum.
    The block layout depends only on the array length.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        blocks = [np.sum(values[s:s + REDUCTION_BLOCK]) for s in range(0, values.shape[0], REDUCTION_BLOCK)]
        return math.fsum(blocks)

    moved = np.moveaxis(values, axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = np.empty(flat.shape[1])
    for j in range(flat.shape[1]):
        out[j] = stable_sum(flat[:, j])
    return out.reshape(moved.shape[1:])


def stable_mean(values: np.ndarray, axis: int = 0) -> np.ndarray | float:
    """Mean counterpart of stable_sum."""
    values = np.asarray(values, dtype=float)
    count = values.shape[axis]
    if count == 0:
        raise ValueError("mean of an empty sample")
    return stable_sum(values, axis=axis) / count
