"""Embedding vectors, prefix truncation, similarity kernels, dimension ladders.

Embeddings are stored as float32; every kernel accumulates in float64 so the
downstream correlation math stays stable. Vectors are plain numpy arrays; the
helpers here validate shape/finiteness at the boundaries that matter.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import ConfigError, DimensionError, ZeroVectorError

ZERO_NORM_EPS = 1e-12


class SimilarityMetric(str, Enum):
    COSINE = "cosine"
    DOT = "dot"
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


def as_embedding(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Coerce to a 1-d float32 vector, rejecting empties and non-finite entries."""
    v = np.asarray(values, dtype=np.float32)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"embedding must be a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("embedding contains NaN or Inf")
    return v


def truncate(v: np.ndarray, m: int) -> np.ndarray:
    """First m coordinates of v, as a copy; the input is left untouched."""
    if m < 1 or m > v.shape[-1]:
        raise DimensionError(f"cannot truncate dim {v.shape[-1]} to {m}")
    return np.array(v[..., :m], copy=True)


def l2_normalize(v: np.ndarray) -> np.ndarray:
    norm = math.sqrt(float(np.dot(v.astype(np.float64), v.astype(np.float64))))
    if norm < ZERO_NORM_EPS:
        raise ZeroVectorError("cannot normalize a (near-)zero vector")
    return (v.astype(np.float64) / norm).astype(v.dtype)


def similarity(u: np.ndarray, v: np.ndarray, metric: SimilarityMetric) -> float:
    """Scalar similarity/distance between two equal-dimension vectors.

    cosine and dot are similarities; euclidean and manhattan are distances
    (callers that need "larger = more similar" negate them, see evaluator).
    """
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    a = u.astype(np.float64)
    b = v.astype(np.float64)
    if metric == SimilarityMetric.COSINE:
        na = math.sqrt(float(np.dot(a, a)))
        nb = math.sqrt(float(np.dot(b, b)))
        if na < ZERO_NORM_EPS or nb < ZERO_NORM_EPS:
            raise ZeroVectorError("cosine undefined for (near-)zero vectors")
        return float(np.dot(a, b) / (na * nb))
    if metric == SimilarityMetric.DOT:
        return float(np.dot(a, b))
    if metric == SimilarityMetric.EUCLIDEAN:
        d = a - b
        return math.sqrt(float(np.dot(d, d)))
    if metric == SimilarityMetric.MANHATTAN:
        return float(np.sum(np.abs(a - b)))
    raise ConfigError(f"unknown metric {metric!r}")


def validate_ladder(dims: Sequence[int], full_dim: int | None = None) -> tuple[int, ...]:
    """Check a dimension ladder: strictly descending positive ints, optionally
    topped by full_dim. Returns the ladder as a tuple."""
    ladder = tuple(int(d) for d in dims)
    if not ladder:
        raise ConfigError("ladder must not be empty")
    if ladder[-1] < 1:
        raise ConfigError(f"ladder entries must be >= 1, got {ladder}")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError(f"ladder must be strictly descending, got {ladder}")
    if full_dim is not None and ladder[0] != full_dim:
        raise ConfigError(f"ladder {ladder} must start at the full dimension {full_dim}")
    return ladder


def ladder_halving(d: int, floor: int) -> tuple[int, ...]:
    """[d, d//2, d//4, ...], stopping before the next entry would drop below floor."""
    if floor < 1 or floor > d:
        raise ConfigError(f"need 1 <= floor <= d, got floor={floor}, d={d}")
    dims = [d]
    while dims[-1] // 2 >= floor:
        dims.append(dims[-1] // 2)
    return tuple(dims)


def ladder_default() -> tuple[int, ...]:
    """The standard full-scale ladder."""
    return (768, 512, 256, 128, 64)
