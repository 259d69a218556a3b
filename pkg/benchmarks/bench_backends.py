"""Benchmark the compiled kernels against the numpy/python fallbacks.

Usage: python benchmarks/bench_backends.py [--quick]

Times the four hot kernels on representative workloads and prints one table;
both backends are imported directly so the comparison ignores the import-time
selection.
"""

import argparse
import time

import numpy as np

from growlab._core import _pyfallback

try:
    from growlab._core import _speedups
except ImportError:
    _speedups = None

from growlab.families import lattice_ball_snapshot, merging_schedule


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_evolve_csr(impl, snap, steps):
    indptr, indices, prob, _ = snap.csr()
    p = np.zeros(snap.n_vertices)
    p[0] = 1.0
    def run():
        q = p
        for _ in range(steps):
            q = np.asarray(impl.evolve_csr(indptr, indices, prob, q))
    return timeit(run)


def bench_walk_steps(impl, snap, steps, n_walkers, seed=0):
    indptr, indices, _, cdf = snap.csr()
    sampler = impl.StepSampler(indptr, indices, cdf)
    rng = np.random.default_rng(seed)
    pos = np.zeros(n_walkers, dtype=np.int64)
    def run():
        p = pos
        for _ in range(steps):
            p = sampler.step(p, rng.random(n_walkers))
    return timeit(run)


def bench_pair_scan(impl, N, steps):
    sched = merging_schedule(N, 0.05, 0.05)
    lo0, di0, up0 = sched.kernel_arrays(0)
    lo1, di1, up1 = sched.kernel_arrays(1)
    def run():
        p = np.zeros(N + 1); p[0] = 1.0
        q = np.zeros(N + 1); q[N] = 1.0
        buf = np.empty(1)
        impl.pair_tridiag_scan(lo0, di0, up0, lo1, di1, up1, p, q, 0, steps,
                               -1.0, -1.0, steps, buf, buf.copy(), 0)
    return timeit(run)


def bench_gray_scan(impl, n_vertices_radius):
    snap = lattice_ball_snapshot(2, n_vertices_radius, 4)
    deg = np.array([snap.degree[v] for v in snap.vertex_ids], dtype=np.int64)
    n = snap.n_vertices
    rows = [[] for _ in range(n)]
    for (x, y), m in snap.multiplicity.items():
        if x != y:
            rows[snap.index_of[x]].append((snap.index_of[y], m))
            rows[snap.index_of[y]].append((snap.index_of[x], m))
    indptr = np.zeros(n + 1, dtype=np.int64)
    idx, mult = [], []
    for i, row in enumerate(rows):
        for j, m in sorted(row):
            idx.append(j); mult.append(m)
        indptr[i + 1] = len(idx)
    args = (deg, indptr, np.asarray(idx, dtype=np.int64),
            np.asarray(mult, dtype=np.int64), snap.volume // 2)
    return timeit(lambda: impl.gray_subset_min_ratio(*args), repeat=1), n


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    scale = 0.2 if args.quick else 1.0
    ball = lattice_ball_snapshot(2, 15, 4)
    rows = []

    for name, steps in (("evolve_csr (481 states)", int(2000 * scale)),):
        py = bench_evolve_csr(_pyfallback, ball, steps)
        cy = bench_evolve_csr(_speedups, ball, steps) if _speedups else float("nan")
        rows.append((name, steps, py, cy))

    steps = int(500 * scale)
    walkers = 100_000
    py = bench_walk_steps(_pyfallback, ball, steps, walkers)
    cy = bench_walk_steps(_speedups, ball, steps, walkers) if _speedups else float("nan")
    rows.append((f"walk_steps ({walkers} walkers)", steps, py, cy))

    steps = int(500_000 * scale)
    py = bench_pair_scan(_pyfallback, 32, steps)
    cy = bench_pair_scan(_speedups, 32, steps) if _speedups else float("nan")
    rows.append(("pair_tridiag_scan (N=32)", steps, py, cy))

    radius = 2 if args.quick else 3
    py, n = bench_gray_scan(_pyfallback, radius)
    cy, _ = bench_gray_scan(_speedups, radius) if _speedups else (float("nan"), n)
    rows.append((f"gray_subset_scan ({n} vertices)", 1 << n, py, cy))

    print(f"{'kernel':<36} {'work':>9} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, work, py, cy in rows:
        ratio = py / cy if cy == cy and cy > 0 else float("nan")
        print(f"{name:<36} {work:>9} {py:>10.4f} {cy:>10.4f} {ratio:>8.1f}")

    # sanity: the two backends agree on a distribution evolution
    indptr, indices, prob, _ = ball.csr()
    p = np.zeros(ball.n_vertices); p[0] = 1.0
    a = np.asarray(_pyfallback.evolve_csr(indptr, indices, prob, p))
    if _speedups:
        b = np.asarray(_speedups.evolve_csr(indptr, indices, prob, p))
        print("backend agreement (1 step, max abs diff):", np.abs(a - b).max())


if __name__ == "__main__":
    main()
