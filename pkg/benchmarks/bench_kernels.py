"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the three hot paths (pattern rendering, single-isometry mismatch,
rotation-center candidate scan) on a 512x512 p6m workload and prints a
side-by-side table.  The numba column includes a warm-up call so compile
time is excluded.
"""

import argparse
import time

import numpy as np

from planesym import _kernels_numpy
from planesym.generate import _ccw_polygon, _ops_inverse_array, random_fd
from planesym.groups import CATALOG
from planesym.lattice import make_lattice

try:
    from planesym import _kernels_numba
except ImportError:
    _kernels_numba = None

PALETTE = [(255, 255, 255), (188, 32, 38), (24, 56, 140)]


def build_workload(canvas=512, cell=64.0):
    g = CATALOG["p6m"]
    lattice = make_lattice("hexagonal", cell)
    fd = random_fd("p6m", lattice, PALETTE, seed=3)
    K = len(g.cosets())
    pal = np.asarray(PALETTE, float) / 255.0
    stack = np.ascontiguousarray(
        np.broadcast_to(pal[fd.indices][None], (K, *fd.indices.shape, 3)).copy())
    render_args = (stack,
                   np.ascontiguousarray(lattice.inverse_matrix()),
                   np.ascontiguousarray(lattice.matrix()),
                   _ops_inverse_array(g),
                   np.ascontiguousarray(_ccw_polygon(g.fd_polygon)),
                   np.asarray(fd.anchor, float), np.zeros(2))
    rng = np.random.default_rng(0)
    img = np.ascontiguousarray(rng.random((canvas, canvas, 3)))
    ang = np.pi / 3
    L = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    centers = rng.uniform(100, 400, (1024, 2))
    ts = centers - centers @ L.T
    return canvas, render_args, img, L, ts


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--canvas", type=int, default=512)
    args = ap.parse_args()

    canvas, render_args, img, L, ts = build_workload(args.canvas)
    t_single = np.array([[5.0, -3.0]])

    cases = {
        "render_rgb 512x512 ss=2": lambda k: k.render_rgb(
            np.zeros((canvas, canvas, 3)), *render_args, 2, True),
        "mismatch_affine stride=1": lambda k: k.mismatch_affine(
            img, L, t_single[0], 1, True),
        "scan_affine 1024 cand stride=4": lambda k: k.scan_affine(
            img, L, ts, 4, True),
    }

    rows = []
    for name, call in cases.items():
        t_np = time_call(lambda: call(_kernels_numpy), args.repeat)
        if _kernels_numba is not None:
            call(_kernels_numba)  # warm-up / compile
            t_nb = time_call(lambda: call(_kernels_numba), args.repeat)
        else:
            t_nb = float("nan")
        rows.append((name, t_nb, t_np))

    w = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{w}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, t_nb, t_np in rows:
        sp = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(f"{name:<{w}}  {t_nb * 1e3:>8.1f}ms  {t_np * 1e3:>8.1f}ms  {sp:>7.1f}x")


if __name__ == "__main__":
    main()
