"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--level 6] [--repeat 5]

Each kernel is called once to warm up (JIT compilation), then timed as the
best of --repeat runs.  Results agree to rounding; the maximum difference is
printed next to the timings.
"""
import argparse
import time

import numpy as np

from stab.geometry import build_icosphere, assemble_fem, conformal_flow
from stab.geometry.flow import locator
from stab.kernels import hopping
from stab.ymh import bundle_init


def best_of(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    mesh = build_icosphere(args.level)
    ops = assemble_fem(mesh)
    loc = locator(mesh)
    pts = conformal_flow(mesh.vertices, np.array([0.0, 0.6, 0.8]), 0.3)
    seeds = loc.first_face
    print(f"level {args.level}: {mesh.n_vertices} vertices, {mesh.n_faces} faces, {mesh.n_edges} edges")

    rows = []
    tn, (fn_, ln) = best_of(lambda: loc.locate(pts, seeds, use_numba=True), args.repeat)
    tp, (fp, lp) = best_of(lambda: loc.locate(pts, seeds, use_numba=False), args.repeat)
    rows.append(("locate_points", tn, tp, float(np.max(np.abs(ln - lp))) if np.all(fn_ == fp) else np.inf))

    rng = np.random.default_rng(0)
    th = bundle_init(mesh, 1).phases
    u = rng.standard_normal(mesh.n_vertices) + 1j * rng.standard_normal(mesh.n_vertices)
    ei, ej = mesh.edges[:, 0], mesh.edges[:, 1]
    w = ops.edge_weights
    tn, a = best_of(lambda: hopping(ei, ej, w, th, u, use_numba=True), args.repeat)
    tp, b = best_of(lambda: hopping(ei, ej, w, th, u, use_numba=False), args.repeat)
    diff = max(abs(a[0] - b[0]) / abs(b[0]), float(np.max(np.abs(a[1] - b[1]))), float(np.max(np.abs(a[2] - b[2]))))
    rows.append(("hopping", tn, tp, diff))

    print(f"{'kernel':<15}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, tn, tp, d in rows:
        print(f"{name:<15}{1e3 * tn:>12.3f}{1e3 * tp:>12.3f}{tp / tn:>10.1f}{d:>12.2e}")


if __name__ == "__main__":
    main()
