"""Seeded Lloyd k-means with k-means++ starts, restarts, and empty-cluster repair."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    inertia_trace: np.ndarray  # within-cluster SSQ after each assignment step


def _dist_sq(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * x @ centers.T
        + (centers * centers).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _plusplus_init(x: np.ndarray, k: int, rng) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[int(rng.integers(n))]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        centers[i] = x[idx]
        closest = np.minimum(closest, ((x - centers[i]) ** 2).sum(axis=1))
    return centers


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int):
    n = x.shape[0]
    k = centers.shape[0]
    trace = []
    labels = None
    for _ in range(max_iter):
        d2 = _dist_sq(x, centers)
        new_labels = np.argmin(d2, axis=1)
        # repair empty clusters by reseeding on the currently worst-fit point
        for empty in np.setdiff1d(np.arange(k), new_labels):
            costs = d2[np.arange(n), new_labels]
            far = int(np.argmax(costs))
            centers[empty] = x[far]
            d2[:, empty] = ((x - centers[empty]) ** 2).sum(axis=1)
            new_labels = np.argmin(d2, axis=1)
        trace.append(float(d2[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            mask = labels == j
            if mask.any():
                centers[j] = x[mask].mean(axis=0)
    labels = new_labels
    return labels, centers, trace[-1], np.asarray(trace)


def kmeans(x, k: int, n_restarts: int = 10, rng=None, max_iter: int = 100) -> KMeansResult:
    """Best of `n_restarts` k-means++-seeded Lloyd runs by within-cluster SSQ.

    If k exceeds the number of distinct rows, some clusters come back empty
    and the partition has fewer effective clusters.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValidationError("x must be 2-D (observations x features)")
    if not 1 <= k <= x.shape[0]:
        raise ValidationError(f"need 1 <= k <= n, got k={k} n={x.shape[0]}")
    rng = np.random.default_rng(rng)
    best = None
    for _ in range(max(1, n_restarts)):
        centers0 = _plusplus_init(x, k, rng)
        labels, centers, inertia, trace = _lloyd(x, centers0, max_iter)
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels=labels, centers=centers, inertia=inertia, inertia_trace=trace)
    return best
