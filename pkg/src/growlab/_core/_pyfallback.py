"""Numpy implementations of the hot kernels.

Mirrors the signatures of the compiled module `_speedups`; selected at import
time by the package `__init__` when the extension is unavailable (or when
GROWLAB_PURE_PYTHON is set).
"""

import numpy as np

BACKEND = "python"


def evolve_csr(indptr, indices, prob, p):
    """One exact distribution step p' = p K for a row-stochastic CSR kernel."""
    counts = np.diff(indptr)
    vals = np.repeat(p, counts) * prob
    return np.bincount(indices, weights=vals, minlength=p.shape[0])


class StepSampler:
    """Samples one walk transition per replicate from row-wise CDFs.

    Rows are offset into a single monotone array so one searchsorted call
    resolves every replicate at once: entry k of row r is stored as
    2*r + cdf[k], and a draw u in row r is looked up as 2*r + u.
    """

    def __init__(self, indptr, indices, cdf):
        self.indices = indices
        rows = np.repeat(np.arange(indptr.shape[0] - 1, dtype=np.int64), np.diff(indptr))
        self._aug = 2.0 * rows + cdf

    def step(self, pos, unif):
        j = np.searchsorted(self._aug, 2.0 * pos + unif, side="right")
        return self.indices[j]


def pair_tridiag_scan(lo0, di0, up0, lo1, di1, up1, p, q, t0, nsteps,
                      delta_tv, delta_sup, stride, tv_buf, sup_buf,
                      stop_when_crossed):
    """Evolve two distributions through 2-periodic tridiagonal kernels.

    p, q are modified in place.  Every step computes the total-variation and
    symmetrized relative-sup discrepancies; every `stride`-th step is recorded
    into the provided buffers.  Returns
    (steps_done, n_recorded, cross_tv, cross_sup, tv_final, sup_final)
    with crossing times as absolute t (or -1 while not crossed).
    """
    kernels = ((lo0, di0, up0), (lo1, di1, up1))
    cross_tv = -1
    cross_sup = -1
    n_rec = 0
    tv = 0.5 * np.abs(p - q).sum()
    sup = _relsup(p, q)
    done = 0
    for k in range(nsteps):
        lo, di, up = kernels[(t0 + k) & 1]
        _tridiag_step(p, lo, di, up)
        _tridiag_step(q, lo, di, up)
        t = t0 + k + 1
        tv = 0.5 * np.abs(p - q).sum()
        sup = _relsup(p, q)
        if cross_tv < 0 and tv < delta_tv:
            cross_tv = t
        if cross_sup < 0 and sup < delta_sup:
            cross_sup = t
        if (k + 1) % stride == 0 and n_rec < tv_buf.shape[0]:
            tv_buf[n_rec] = tv
            sup_buf[n_rec] = sup
            n_rec += 1
        done = k + 1
        if stop_when_crossed and cross_tv >= 0 and cross_sup >= 0:
            break
    return done, n_rec, cross_tv, cross_sup, tv, sup


def _tridiag_step(p, lo, di, up):
    nxt = p * di
    nxt[1:] += (p * up)[:-1]
    nxt[:-1] += (p * lo)[1:]
    p[:] = nxt


def _relsup(p, q):
    both = (p > 0) & (q > 0)
    if np.any((p > 0) != (q > 0)):
        return np.inf
    if not both.any():
        return 0.0
    r = p[both] / q[both]
    return max(r.max(), (1.0 / r).max()) - 1.0


def gray_subset_min_ratio(deg, adj_indptr, adj_indices, adj_mult, half_vol):
    """Minimum cut/weight ratio per achieved set weight, by Gray-code scan.

    deg includes self-loops (full vertex weights); the adjacency arrays must
    exclude self-loops.  Returns an array m with m[w] = min over subsets A of
    pi(A, A^c)/pi(A) among A with pi(A) = w, for w in [0, half_vol]; +inf
    where no subset achieves that weight.
    """
    n = deg.shape[0]
    out = np.full(half_vol + 1, np.inf)
    in_set = [False] * n
    conn = [0] * n
    weight = 0
    cut = 0
    nl = [int(adj_mult[adj_indptr[v]:adj_indptr[v + 1]].sum()) for v in range(n)]
    for i in range(1, 1 << n):
        j = (i & -i).bit_length() - 1
        if in_set[j]:
            in_set[j] = False
            weight -= deg[j]
            cut -= nl[j] - 2 * conn[j]
            sgn = -1
        else:
            in_set[j] = True
            weight += deg[j]
            cut += nl[j] - 2 * conn[j]
            sgn = 1
        for k in range(adj_indptr[j], adj_indptr[j + 1]):
            conn[adj_indices[k]] += sgn * adj_mult[k]
        if 0 < weight <= half_vol:
            ratio = cut / weight
            if ratio < out[weight]:
                out[weight] = ratio
    return out
