"""Clustering of document vectors (DBSCAN, KMeans with elbow selection) and PCA projection."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .embedding import EmbeddingMatrix
from .tfidf import TermDocMatrix, rank_terms

log = logging.getLogger(__name__)

NOISE = -1
METRICS = ("euclidean", "cosine")


def _as_array(points) -> tuple[list[str], np.ndarray]:
    if isinstance(points, EmbeddingMatrix):
        return list(points.ids), points.vectors
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array")
    return [str(i) for i in range(len(X))], X


def _metric_space(X: np.ndarray, metric: str) -> np.ndarray:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if metric == "euclidean":
        return X
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)


@dataclass
class KDistanceCurve:
    k: int
    distances: np.ndarray


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: int = 4

    def __post_init__(self) -> None:
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ValueError("eps must be a positive finite number")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")


@dataclass
class ClusterResult:
    ids: list[str]
    labels: np.ndarray
    k: int
    algorithm: str
    centroids: np.ndarray | None = None
    inertia: float | None = None
    history: list[float] = field(default_factory=list)

    @property
    def label_map(self) -> dict[str, int]:
        return {d: int(l) for d, l in zip(self.ids, self.labels)}

    @property
    def n_noise(self) -> int:
        return int(np.sum(self.labels == NOISE))


@dataclass
class ElbowCurve:
    ks: list[int]
    inertias: list[float]


@dataclass
class Projection2D:
    ids: list[str]
    coords: np.ndarray
    explained_variance: tuple[float, ...]
    components: np.ndarray
    mean: np.ndarray


def k_distance_curve(points, k: int, metric: str = "euclidean") -> KDistanceCurve:
    """Sorted distances from each point to its k-th nearest other point."""
    _, X = _as_array(points)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(X) <= k:
        raise ValueError(f"need more than k={k} points, got {len(X)}")
    d = kernels.kth_neighbor_distances(_metric_space(X, metric), k)
    if metric == "cosine":
        d = d * d / 2.0
    return KDistanceCurve(k, np.sort(d))


def knee_point(values: Sequence[float]) -> int:
    """Index farthest from the chord joining the first and last point.

    The curve is rescaled to the unit square first (x by position, y by
    min/max). Ties go to the smallest index; a flat or straight curve gives 0.
    """
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 1 or len(y) < 3:
        raise ValueError("knee_point needs at least 3 values")
    x = np.linspace(0.0, 1.0, len(y))
    span = y.max() - y.min()
    if span == 0:
        return 0
    yn = (y - y.min()) / span
    # perpendicular distance to the line through (0, yn[0]) and (1, yn[-1])
    dy = yn[-1] - yn[0]
    dist = np.abs(dy * x - (yn - yn[0])) / math.hypot(1.0, dy)
    dist = np.round(dist, 12)  # ulp noise would otherwise break exact ties
    return int(np.argmax(dist))


def select_eps(points, min_pts: int = 4, metric: str = "euclidean") -> tuple[float, KDistanceCurve]:
    """eps at the knee of the ``min_pts``-distance curve."""
    curve = k_distance_curve(points, min_pts, metric)
    eps = float(curve.distances[knee_point(curve.distances)])
    if eps <= 0:
        positive = curve.distances[curve.distances > 0]
        eps = float(positive[0]) if len(positive) else 1e-12
    return eps, curve


def dbscan(points, params: DbscanParams, metric: str = "euclidean") -> ClusterResult:
    """Density clustering; a point is core with ``min_pts`` neighbors within eps, itself included.

    Cluster ids follow the order in which unvisited core points are met.
    """
    ids, X = _as_array(points)
    eps = params.eps
    if metric == "cosine":
        eps = math.sqrt(2.0 * eps)
    labels = kernels.dbscan_labels(_metric_space(X, metric), eps, params.min_pts)
    labels = np.asarray(labels, dtype=np.int64)
    k = int(labels.max()) + 1 if len(labels) else 0
    return ClusterResult(ids, labels, k, "dbscan")


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centers = [int(rng.integers(n))]
    d2 = np.sum((X - X[centers[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers.append(idx)
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return X[centers].copy()


def _assign(X, centroids):
    labels, _ = kernels.assign_labels(X, centroids)
    # recomputed here so inertia does not depend on the kernel backend's summation order
    diff = X - centroids[labels]
    return labels, np.einsum("ij,ij->i", diff, diff)


def _lloyd(X, centroids, max_iter, tol):
    k = len(centroids)
    history = []
    for _ in range(max_iter):
        labels, d2 = _assign(X, centroids)
        history.append(float(d2.sum()))
        new = centroids.copy()
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c]:
                new[c] = X[labels == c].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if len(empty):
            far = d2.copy()
            for c in empty:
                p = int(np.argmax(far))
                new[c] = X[p]
                far[p] = -1.0
        shift = float(np.sum((new - centroids) ** 2))
        centroids = new
        if shift <= tol and not len(empty):
            break
    labels, d2 = _assign(X, centroids)
    history.append(float(d2.sum()))
    return centroids, labels, float(d2.sum()), history


def kmeans(
    points,
    k: int,
    seed: int = 0,
    restarts: int = 10,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ClusterResult:
    """Lloyd's algorithm from k-means++ starts; the restart with least inertia wins.

    Iteration stops once the summed squared centroid shift is at most
    ``tol`` times the mean per-feature variance. Empty clusters are moved to
    the point farthest from its centroid.
    """
    ids, X = _as_array(points)
    n = len(X)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if restarts < 1 or max_iter < 1:
        raise ValueError("restarts and max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    abs_tol = tol * float(np.mean(np.var(X, axis=0)))
    best = None
    for _ in range(restarts):
        run = _lloyd(X, _kmeanspp(X, k, rng), max_iter, abs_tol)
        if best is None or run[2] < best[2]:
            best = run
    centroids, labels, inertia, history = best
    return ClusterResult(ids, labels, k, "kmeans", centroids, inertia, history)


def elbow_select(
    points,
    k_min: int = 1,
    k_max: int = 10,
    seed: int = 0,
    restarts: int = 10,
) -> tuple[int, ElbowCurve]:
    """Run KMeans for every k in the range and pick k at the knee of the inertia curve."""
    _, X = _as_array(points)
    if k_max - k_min < 2:
        raise ValueError("need k_max - k_min >= 2")
    if k_min < 1 or k_max > len(X):
        raise ValueError(f"k range [{k_min}, {k_max}] invalid for {len(X)} points")
    ks = list(range(k_min, k_max + 1))
    inertias = [kmeans(X, k, seed=seed, restarts=restarts).inertia for k in ks]
    return ks[knee_point(inertias)], ElbowCurve(ks, inertias)


def pca_project(points, dims: int = 2) -> Projection2D:
    """Project onto the leading eigenvectors of the covariance matrix.

    Each component is signed so that its largest-magnitude entry is positive.
    ``explained_variance`` holds eigenvalue / total variance per component.
    """
    ids, X = _as_array(points)
    n, d = X.shape
    if n < 2:
        raise ValueError("PCA needs at least 2 points")
    if not 1 <= dims <= d:
        raise ValueError(f"dims must be in [1, {d}]")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / n
    total = float(np.trace(cov))
    if not total > 0:
        raise ValueError("degenerate covariance")
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:dims]
    evals = np.clip(evals[order], 0.0, None)
    comps = evecs[:, order].T
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    return Projection2D(ids, Xc @ comps.T, tuple(float(v / total) for v in evals), comps, mean)


def cluster_top_terms(
    result: ClusterResult,
    matrix: TermDocMatrix,
    n: int = 5,
    exclude: Iterable[str] = (),
    warnings: list[str] | None = None,
) -> dict[int, list[str]]:
    """Top ``n`` terms per cluster by mean tf-idf of its member documents.

    Only terms occurring in the cluster are eligible; noise is skipped.
    """
    rindex = matrix.row_index
    exclude = set(exclude)
    out: dict[int, list[str]] = {}
    for c in sorted(set(int(l) for l in result.labels) - {NOISE}):
        rows = [rindex[d] for d, l in zip(result.ids, result.labels) if l == c and d in rindex]
        if not rows:
            msg = f"cluster {c} has no documents in the term matrix"
            log.warning(msg)
            if warnings is not None:
                warnings.append(msg)
            continue
        means = np.asarray(matrix.values[rows].mean(axis=0)).ravel()
        absent = {t for t, m in zip(matrix.vocab.terms, means) if m <= 0}
        out[c] = rank_terms(matrix.vocab.terms, means, n, exclude | absent)
    return out
