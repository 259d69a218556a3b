"""Parity between the compiled kernels and the numpy/python fallbacks."""

import numpy as np
import pytest

from growlab._core import _pyfallback
from growlab.families import lattice_ball_snapshot, merging_schedule

speedups = pytest.importorskip("growlab._core._speedups")


@pytest.fixture(scope="module")
def ball():
    return lattice_ball_snapshot(2, 3, 4)


def test_evolve_csr_agrees(ball):
    indptr, indices, prob, _ = ball.csr()
    rng = np.random.default_rng(0)
    p = rng.random(ball.n_vertices)
    p /= p.sum()
    a = np.asarray(_pyfallback.evolve_csr(indptr, indices, prob, p))
    b = np.asarray(speedups.evolve_csr(indptr, indices, prob, p))
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)


def test_step_sampler_agrees(ball):
    indptr, indices, _, cdf = ball.csr()
    s_py = _pyfallback.StepSampler(indptr, indices, cdf)
    s_cy = speedups.StepSampler(indptr, indices, cdf)
    rng = np.random.default_rng(1)
    pos = rng.integers(0, ball.n_vertices, size=5000)
    for _ in range(20):
        u = rng.random(5000)
        a = s_py.step(pos, u)
        b = s_cy.step(pos, u)
        np.testing.assert_array_equal(a, b)
        pos = a


def test_step_sampler_exact_cdf_boundary(ball):
    # a draw equal to a cdf entry must select the next slot in both backends
    indptr = np.array([0, 2], dtype=np.int64)
    indices = np.array([0, 0], dtype=np.int64)
    cdf = np.array([0.5, 1.0])
    pos = np.zeros(4, dtype=np.int64)
    u = np.array([0.0, 0.5 - 1e-16, 0.5, 0.999])
    a = _pyfallback.StepSampler(indptr, indices, cdf).step(pos, u)
    b = speedups.StepSampler(indptr, indices, cdf).step(pos, u)
    np.testing.assert_array_equal(a, b)


def test_pair_tridiag_scan_agrees():
    sched = merging_schedule(16, 0.05, 0.05)
    lo0, di0, up0 = sched.kernel_arrays(0)
    lo1, di1, up1 = sched.kernel_arrays(1)
    results = []
    for impl in (_pyfallback, speedups):
        p = np.zeros(17)
        q = np.zeros(17)
        p[0] = 1.0
        q[16] = 1.0
        tv_buf = np.empty(500)
        sup_buf = np.empty(500)
        out = impl.pair_tridiag_scan(lo0, di0, up0, lo1, di1, up1, p, q,
                                     0, 500, 0.5, 0.5, 1, tv_buf, sup_buf, 0)
        results.append((out, tv_buf.copy(), sup_buf.copy(), p.copy(), q.copy()))
    (out_a, tv_a, sup_a, p_a, q_a), (out_b, tv_b, sup_b, p_b, q_b) = results
    assert out_a[2] == out_b[2] and out_a[3] == out_b[3]  # crossing times
    np.testing.assert_allclose(tv_a, tv_b, atol=1e-13)
    finite = np.isfinite(sup_a)
    np.testing.assert_array_equal(finite, np.isfinite(sup_b))
    np.testing.assert_allclose(sup_a[finite], sup_b[finite], atol=1e-10)
    np.testing.assert_allclose(p_a, p_b, atol=1e-14)


def test_gray_subset_scan_agrees():
    ball = lattice_ball_snapshot(2, 2, 4)  # 13 vertices: feasible in pure python
    deg = np.array([ball.degree[v] for v in ball.vertex_ids], dtype=np.int64)
    n = ball.n_vertices
    rows = [[] for _ in range(n)]
    for (x, y), m in ball.multiplicity.items():
        if x != y:
            rows[ball.index_of[x]].append((ball.index_of[y], m))
            rows[ball.index_of[y]].append((ball.index_of[x], m))
    indptr = np.zeros(n + 1, dtype=np.int64)
    idx, mult = [], []
    for i, row in enumerate(rows):
        for j, m in sorted(row):
            idx.append(j)
            mult.append(m)
        indptr[i + 1] = len(idx)
    args = (deg, indptr, np.asarray(idx, dtype=np.int64),
            np.asarray(mult, dtype=np.int64), ball.volume // 2)
    a = _pyfallback.gray_subset_min_ratio(*args)
    b = speedups.gray_subset_min_ratio(*args)
    np.testing.assert_array_equal(a, b)
