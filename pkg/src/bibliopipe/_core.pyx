# cython: language_level=3
"""Compiled kernels: layout forces, neighbor queries, DBSCAN, centroid assignment."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()

cdef double MIN_DIST = 0.01


def fr_layout(pos, edges, double k, double t0, int iterations, double size=1.0):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.array(pos, dtype=np.float64, copy=True).reshape(-1, 2)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] e = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t m = e.shape[0]
    cdef double[:, ::1] P = p
    cdef cnp.int64_t[:, ::1] E = e
    cdef double[::1] ax = np.zeros(n)
    cdef double[::1] ay = np.zeros(n)
    cdef Py_ssize_t i, j, it, ei, u, v
    cdef double t, dx, dy, d, f, fx, fy, sx, sy, xi, yi, ln, step, x, y
    cdef double kk = k * k
    for it in range(iterations):
        t = t0 * (1.0 - <double>it / iterations)
        for i in range(n):
            xi = P[i, 0]
            yi = P[i, 1]
            sx = 0.0
            sy = 0.0
            for j in range(n):
                if i == j:
                    continue
                dx = xi - P[j, 0]
                dy = yi - P[j, 1]
                d = sqrt(dx * dx + dy * dy)
                if d < MIN_DIST:
                    d = MIN_DIST
                f = kk / d
                sx += dx / d * f
                sy += dy / d * f
            ax[i] = sx
            ay[i] = sy
        for ei in range(m):
            u = E[ei, 0]
            v = E[ei, 1]
            dx = P[u, 0] - P[v, 0]
            dy = P[u, 1] - P[v, 1]
            d = sqrt(dx * dx + dy * dy)
            if d < MIN_DIST:
                d = MIN_DIST
            f = d * d / k
            fx = dx / d * f
            fy = dy / d * f
            ax[u] -= fx
            ay[u] -= fy
            ax[v] += fx
            ay[v] += fy
        for i in range(n):
            ln = sqrt(ax[i] * ax[i] + ay[i] * ay[i])
            if ln > 0.0:
                step = ln if ln < t else t
                x = P[i, 0] + ax[i] / ln * step
                y = P[i, 1] + ay[i] / ln * step
                P[i, 0] = 0.0 if x < 0.0 else (size if x > size else x)
                P[i, 1] = 0.0 if y < 0.0 else (size if y > size else y)
    return p


cdef inline double _sqdist(const double[:, ::1] X, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t c
    cdef double s = 0.0, diff
    for c in range(X.shape[1]):
        diff = X[a, c] - X[b, c]
        s += diff * diff
    return s


def kth_neighbor_distances(points, int k):
    cdef const double[:, ::1] X = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] best = np.empty(k)
    cdef Py_ssize_t i, j, s
    cdef double d
    for i in range(n):
        # best[0..k) holds the k smallest squared distances, ascending
        for s in range(k):
            best[s] = INFINITY
        for j in range(n):
            if i == j:
                continue
            d = _sqdist(X, i, j)
            if d < best[k - 1]:
                s = k - 1
                while s > 0 and best[s - 1] > d:
                    best[s] = best[s - 1]
                    s -= 1
                best[s] = d
        out[i] = sqrt(best[k - 1])
    return out


def dbscan_labels(points, double eps, int min_pts):
    cdef const double[:, ::1] X = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0]
    cdef double eps2 = eps * eps
    cdef Py_ssize_t i, j, p, q, head, tail
    cdef cnp.int64_t cluster = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef cnp.int64_t[::1] counts = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.uint8_t[::1] within
    for i in range(n):
        for j in range(n):
            if _sqdist(X, i, j) <= eps2:
                counts[i] += 1
    for i in range(n):
        if labels[i] != -1 or counts[i] < min_pts:
            continue
        labels[i] = cluster
        head = 0
        tail = 0
        queue[tail] = i
        tail += 1
        while head < tail:
            p = queue[head]
            head += 1
            for q in range(n):
                if labels[q] == -1 and _sqdist(X, p, q) <= eps2:
                    labels[q] = cluster
                    if counts[q] >= min_pts:
                        queue[tail] = q
                        tail += 1
        cluster += 1
    return labels_arr


def assign_labels(points, centroids):
    cdef const double[:, ::1] X = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0], kc = C.shape[0], dim = X.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best = np.empty(n)
    cdef Py_ssize_t i, c, a, arg
    cdef double s, diff, b
    for i in range(n):
        b = INFINITY
        arg = 0
        for c in range(kc):
            s = 0.0
            for a in range(dim):
                diff = X[i, a] - C[c, a]
                s += diff * diff
            if s < b:
                b = s
                arg = c
        labels[i] = arg
        best[i] = b
    return labels, best
