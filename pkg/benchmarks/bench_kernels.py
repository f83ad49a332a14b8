"""Time each kernel under the compiled and pure-Python backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from bibliopipe import kernels


def cases(rng):
    n_nodes = 120
    pos = rng.random((n_nodes, 2))
    edges = np.array([(i, (i * 7 + 3) % n_nodes) for i in range(n_nodes)], dtype=np.int64)
    pts = rng.normal(size=(800, 16))
    cents = rng.normal(size=(10, 16))
    return {
        "fr_layout (120 nodes, 50 iters)": lambda m: m.fr_layout(pos, edges, 0.09, 0.1, 50, 1.0),
        "kth_neighbor_distances (800x16, k=4)": lambda m: m.kth_neighbor_distances(pts, 4),
        "dbscan_labels (800x16)": lambda m: m.dbscan_labels(pts, 4.0, 4),
        "assign_labels (800x16, 10 centroids)": lambda m: m.assign_labels(pts, cents),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args(argv)
    backends = {"python": kernels.backend("python")}
    try:
        backends["compiled"] = kernels.backend("compiled")
    except ImportError:
        print("compiled backend not built; timing the Python fallback only")
    results = {}
    print(f"{'kernel':40s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, fn in cases(np.random.default_rng(0)).items():
        row = {b: best_of(lambda m=m: fn(m), args.repeat) for b, m in backends.items()}
        results[name] = row
        speed = f"{row['python'] / row['compiled']:8.1f}x" if "compiled" in row else ""
        print(f"{name:40s} " + " ".join(f"{t * 1e3:8.1f}ms" for t in row.values()) + f"  {speed}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
