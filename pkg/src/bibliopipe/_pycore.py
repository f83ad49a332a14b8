"""Pure-Python kernels. Same signatures and results as the compiled ``_core``.

The layout loop is written with scalar float arithmetic in exactly the
operation order of the compiled version so both produce identical bits.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

MIN_DIST = 0.01


def fr_layout(pos, edges, k, t0, iterations, size=1.0):
    pos = np.asarray(pos, dtype=np.float64)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    n = pos.shape[0]
    xs = pos[:, 0].tolist()
    ys = pos[:, 1].tolist()
    eu = edges[:, 0].tolist()
    ev = edges[:, 1].tolist()
    kk = k * k
    for it in range(iterations):
        t = t0 * (1.0 - it / iterations)
        dx_acc = [0.0] * n
        dy_acc = [0.0] * n
        for i in range(n):
            xi = xs[i]
            yi = ys[i]
            ax = 0.0
            ay = 0.0
            for j in range(n):
                if i == j:
                    continue
                dx = xi - xs[j]
                dy = yi - ys[j]
                d = math.sqrt(dx * dx + dy * dy)
                if d < MIN_DIST:
                    d = MIN_DIST
                f = kk / d
                ax += dx / d * f
                ay += dy / d * f
            dx_acc[i] = ax
            dy_acc[i] = ay
        for e in range(len(eu)):
            u = eu[e]
            v = ev[e]
            dx = xs[u] - xs[v]
            dy = ys[u] - ys[v]
            d = math.sqrt(dx * dx + dy * dy)
            if d < MIN_DIST:
                d = MIN_DIST
            f = d * d / k
            fx = dx / d * f
            fy = dy / d * f
            dx_acc[u] -= fx
            dy_acc[u] -= fy
            dx_acc[v] += fx
            dy_acc[v] += fy
        for i in range(n):
            ln = math.sqrt(dx_acc[i] * dx_acc[i] + dy_acc[i] * dy_acc[i])
            if ln > 0.0:
                step = ln if ln < t else t
                x = xs[i] + dx_acc[i] / ln * step
                y = ys[i] + dy_acc[i] / ln * step
                # keep nodes inside the [0, size]^2 frame
                xs[i] = 0.0 if x < 0.0 else size if x > size else x
                ys[i] = 0.0 if y < 0.0 else size if y > size else y
    return np.column_stack([xs, ys]) if n else np.zeros((0, 2))


def _sq_dists(points):
    points = np.asarray(points, dtype=np.float64)
    diff = points[:, None, :] - points[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kth_neighbor_distances(points, k):
    """Distance from every point to its k-th nearest other point (unsorted)."""
    sq = _sq_dists(points)
    np.fill_diagonal(sq, np.inf)
    part = np.partition(sq, k - 1, axis=1)[:, k - 1]
    return np.sqrt(part)


def dbscan_labels(points, eps, min_pts):
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    within = _sq_dists(points) <= eps * eps
    neighbors = [np.flatnonzero(within[i]) for i in range(n)]
    core = np.array([len(nb) >= min_pts for nb in neighbors], dtype=bool)
    labels = np.full(n, -1, dtype=np.int64)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster
        queue = deque([i])
        while queue:
            p = queue.popleft()
            for q in neighbors[p]:
                if labels[q] == -1:
                    labels[q] = cluster
                    if core[q]:
                        queue.append(q)
        cluster += 1
    return labels


def assign_labels(points, centroids):
    """Nearest centroid per point (lowest index on ties) and its squared distance."""
    points = np.asarray(points, dtype=np.float64)
    centroids = np.asarray(centroids, dtype=np.float64)
    diff = points[:, None, :] - centroids[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    labels = np.argmin(sq, axis=1).astype(np.int64)
    return labels, sq[np.arange(len(points)), labels]
