"""K-means clustering of embedding rows (Lloyd + k-means++, best of restarts)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import EmbeddingMatrix


@dataclass(frozen=True)
class KmeansParams:
    k: int
    restarts: int = 10
    max_iters: int = 300
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class KmeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    sse: float
    restart_sses: np.ndarray


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x - c||^2 expanded; clamped at 0 against cancellation noise
    d2 = (np.sum(points ** 2, axis=1)[:, None]
          + np.sum(centroids ** 2, axis=1)[None, :]
          - 2.0 * points @ centroids.T)
    return np.maximum(d2, 0.0)


def _kmeanspp_init(points: np.ndarray, k: int,
                   rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    closest = np.sum((points - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # all remaining points coincide with a chosen centroid
            centroids[i] = points[rng.integers(n)]
            continue
        target = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(closest), target))
        idx = min(idx, n - 1)
        centroids[i] = points[idx]
        closest = np.minimum(closest,
                             np.sum((points - centroids[i]) ** 2, axis=1))
    return centroids


def _lloyd(points: np.ndarray, centroids: np.ndarray,
           max_iters: int, tol: float) -> tuple[np.ndarray, np.ndarray, float]:
    k = centroids.shape[0]
    prev_sse = np.inf
    labels = np.zeros(points.shape[0], dtype=np.int64)
    for _ in range(max_iters):
        d2 = _squared_distances(points, centroids)
        labels = np.argmin(d2, axis=1)
        sse = float(d2[np.arange(points.shape[0]), labels].sum())
        assert sse <= prev_sse * (1 + 1e-9) + 1e-12, \
            "within-cluster SSE increased across a Lloyd iteration"
        prev_sse = sse

        new_centroids = centroids.copy()
        for c in range(k):
            mask = labels == c
            if mask.any():
                new_centroids[c] = points[mask].mean(axis=0)
        # repair empty clusters: reseed at the point farthest from its centroid
        empty = [c for c in range(k) if not np.any(labels == c)]
        if empty:
            residual = d2[np.arange(points.shape[0]), labels].copy()
            for c in empty:
                far = int(np.argmax(residual))
                new_centroids[c] = points[far]
                residual[far] = -1.0

        shift = float(np.sum((new_centroids - centroids) ** 2))
        centroids = new_centroids
        if shift < tol:
            break
    d2 = _squared_distances(points, centroids)
    labels = np.argmin(d2, axis=1)
    sse = float(d2[np.arange(points.shape[0]), labels].sum())
    return labels, centroids, sse


def kmeans(points: np.ndarray, params: KmeansParams) -> KmeansResult:
    """Cluster rows of ``points``; keeps the lowest-SSE restart."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if points.shape[0] < params.k:
        raise ValueError(f"need at least k={params.k} points, "
                         f"got {points.shape[0]}")
    seeds = np.random.SeedSequence(params.seed).spawn(params.restarts)
    best: KmeansResult | None = None
    restart_sses = np.empty(params.restarts)
    for r in range(params.restarts):
        rng = np.random.default_rng(seeds[r])
        init = _kmeanspp_init(points, params.k, rng)
        labels, centroids, sse = _lloyd(points, init, params.max_iters,
                                        params.tol)
        restart_sses[r] = sse
        if best is None or sse < best.sse:
            best = KmeansResult(labels, centroids, sse, restart_sses)
    assert best is not None
    best.restart_sses = restart_sses
    return best


def cluster_embedding(emb: EmbeddingMatrix, params: KmeansParams) -> KmeansResult:
    """Fit k-means on trained rows only, then label untrained rows by
    nearest centroid so the result covers every node."""
    trained_idx = np.flatnonzero(emb.trained)
    result = kmeans(emb.vectors[trained_idx], params)
    labels = np.empty(emb.n, dtype=np.int64)
    labels[trained_idx] = result.labels
    untrained_idx = np.flatnonzero(~emb.trained)
    if untrained_idx.size:
        d2 = _squared_distances(emb.vectors[untrained_idx], result.centroids)
        labels[untrained_idx] = np.argmin(d2, axis=1)
    return KmeansResult(labels, result.centroids, result.sse,
                        result.restart_sses)
