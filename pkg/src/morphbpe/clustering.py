"""Feature-hashed bag-of-morphemes vectors and a deterministic k-means.

Hashing uses blake2b rather than Python's builtin hash, which is salted per
process and would break cross-run determinism.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence

import numpy as np


def feature_index(feature: str, dim: int) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % dim


def hash_feature_sets(sets: Sequence[Iterable[str]], dim: int) -> np.ndarray:
    """Binary (n, dim) matrix: row i has a 1 wherever a feature of set i hashes."""
    if dim < 1:
        raise ValueError(f"feature dimension must be positive, got {dim}")
    matrix = np.zeros((len(sets), dim), dtype=np.float64)
    for i, features in enumerate(sets):
        for feature in features:
            matrix[i, feature_index(feature, dim)] = 1.0
    return matrix


def _squared_distances(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    x_sq = np.einsum("ij,ij->i", x, x)
    c_sq = np.einsum("ij,ij->i", centers, centers)
    d = x_sq[:, None] - 2.0 * (x @ centers.T) + c_sq[None, :]
    np.maximum(d, 0.0, out=d)
    return d


def _plus_plus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=x.dtype)
    first = int(rng.integers(n))
    centers[0] = x[first]
    # Running min squared distance to the chosen centers.
    d2 = _squared_distances(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = x[idx]
        d2 = np.minimum(d2, _squared_distances(x, centers[j : j + 1])[:, 0])
    return centers


def kmeans_labels(
    x: np.ndarray, k: int, seed: int, iterations: int = 25
) -> np.ndarray:
    """Cluster rows of x with k-means++ init and a fixed Lloyd iteration count.

    Fully deterministic for a given (x, k, seed). Ties in the assignment step
    go to the lowest cluster index; a cluster that loses all members keeps its
    previous center.
    """
    n = x.shape[0]
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n < k:
        raise ValueError(f"need at least k={k} rows, got {n}")
    rng = np.random.default_rng(seed)
    centers = _plus_plus_init(x, k, rng)
    for _ in range(iterations):
        labels = np.argmin(_squared_distances(x, centers), axis=1)
        for j in range(k):
            members = x[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    return np.argmin(_squared_distances(x, centers), axis=1)
