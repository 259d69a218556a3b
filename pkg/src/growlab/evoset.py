"""Evolving-set process on a growing sequence, plain and size-biased.

One shared uniform per step thresholds every candidate vertex, so smaller
draws produce supersets pathwise.  The weight sequence pi^(t)(S_t) is a
martingale; the size-biased law is realized by importance-weighting plain
trajectories with pi^(t)(S_t)/pi^(0)(x0), which is zero once extinct.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MonotonicityError
from .walk import _chunk_rng

RATIO_TOL = 1e-9


def evolving_step(S, snap_t, snap_t1, U):
    """One threshold update: {y : pi^(t)(S, y)/pi^(t+1)(y) > U}.

    Ratios above 1 signal a non-monotone pair of snapshots and raise.
    """
    S = set(S)
    if not S:
        return set()
    num = {}
    for (a, b), m in snap_t.multiplicity.items():
        if a in S:
            num[b] = num.get(b, 0) + m
        if b in S and a != b:
            num[a] = num.get(a, 0) + m
    out = set()
    for y, n in num.items():
        ratio = n / snap_t1.degree[y]
        if ratio > 1 + RATIO_TOL:
            raise MonotonicityError(
                f"pi^(t)(S,{y})/pi^(t+1)({y}) = {ratio:.6g} > 1")
        if ratio > U:
            out.add(y)
    return out


def _dense_mult(snap_t, snap_t1):
    """pi^(t) as a dense matrix mapping V_t rows to V_{t+1} columns."""
    M = np.zeros((snap_t.n_vertices, snap_t1.n_vertices))
    for (a, b), m in snap_t.multiplicity.items():
        ia, ja = snap_t.index_of[a], snap_t1.index_of[a]
        ib, jb = snap_t.index_of[b], snap_t1.index_of[b]
        M[ia, jb] += m
        if a != b:
            M[ib, ja] += m
    return M


@dataclass
class EvolvingSetRun:
    x0: int
    T: int
    n_replicates: int
    seed: int
    snapshots: dict = field(default_factory=dict)        # t -> snapshot
    member_freq: dict = field(default_factory=dict)      # t -> frequency array
    weight_mean: dict = field(default_factory=dict)      # t -> (mean, se)
    start_weight: float = 0.0

    def membership(self, t, y):
        """(estimate, standard error) of P(y in S_t)."""
        snap = self.snapshots[t]
        i = snap.index_of.get(y)
        p = 0.0 if i is None else float(self.member_freq[t][i])
        return p, math.sqrt(p * (1 - p) / self.n_replicates)

    def walk_probability(self, t, y):
        """Identity-based estimate of P(0,x0;t,y), with its standard error."""
        snap = self.snapshots[t]
        scale = snap.degree.get(y, 0) / self.start_weight
        p, se = self.membership(t, y)
        return scale * p, scale * se


def run_plain(seq, x0, T, n_replicates, seed):
    """Replicate-vectorized plain evolving sets started from {x0}.

    Returns per-t membership frequencies and the weight-trajectory means
    needed for martingale checks.
    """
    snap = seq.snapshot_at(0)
    if x0 not in snap.index_of:
        raise ValueError(f"start vertex {x0} not present at t=0")
    run = EvolvingSetRun(x0=x0, T=T, n_replicates=n_replicates, seed=seed,
                         start_weight=snap.degree[x0])
    rng = _chunk_rng(seed, 0)
    S = np.zeros((n_replicates, snap.n_vertices), dtype=bool)
    S[:, snap.index_of[x0]] = True
    _record(run, 0, snap, S)
    for t in range(T):
        cur = seq.snapshot_at(t)
        if cur is not snap:
            S = _embed_members(S, snap, cur)
            snap = cur
        nxt = seq.snapshot_at(t + 1)
        M = _dense_mult(snap, nxt)
        deg1 = np.array([nxt.degree[v] for v in nxt.vertex_ids], dtype=np.float64)
        ratio = (S.astype(np.float64) @ M) / deg1
        if ratio.max() > 1 + RATIO_TOL:
            raise MonotonicityError(f"membership ratio {ratio.max():.6g} > 1 at t={t}")
        U = rng.random(n_replicates)
        S = ratio > U[:, None]
        snap = nxt
        _record(run, t + 1, snap, S)
    return run


def _record(run, t, snap, S):
    run.snapshots[t] = snap
    run.member_freq[t] = S.mean(axis=0)
    deg = np.array([snap.degree[v] for v in snap.vertex_ids], dtype=np.float64)
    w = S.astype(np.float64) @ deg
    run.weight_mean[t] = (float(w.mean()), float(w.std(ddof=1) / math.sqrt(len(w))))


def _embed_members(S, old_snap, new_snap):
    out = np.zeros((S.shape[0], new_snap.n_vertices), dtype=bool)
    pos = np.array([new_snap.index_of[v] for v in old_snap.vertex_ids], dtype=np.int64)
    out[:, pos] = S
    return out


@dataclass
class SizeBiasedRun:
    x0: int
    T: int
    n_replicates: int
    seed: int
    alpha: float
    s_anchor: int
    event_threshold: float
    L: dict = field(default_factory=dict)            # u -> (estimate, se)
    weight_mean: dict = field(default_factory=dict)  # t -> mean importance weight
    extinct_frac: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)      # t -> per-replicate pi(S_t)
    event_ok: dict = field(default_factory=dict)     # t -> per-replicate 1_{A_t}


def run_size_biased(seq, x0, T, n_replicates, seed, *, alpha=0.5, s_anchor=None,
                    keep_weights=False):
    """Size-biased functionals by importance weighting of plain trajectories.

    Estimates L_u = (size-biased mean of) pi^(u)(S_u)^(alpha-1) restricted to
    the event that the running weight maximum stays at or below v(s)/2, for
    u in [s, T]; s defaults to T//2.  keep_weights retains the per-replicate
    weight and event trajectories for downstream functionals.
    """
    if s_anchor is None:
        s_anchor = T // 2
    snap = seq.snapshot_at(0)
    if x0 not in snap.index_of:
        raise ValueError(f"start vertex {x0} not present at t=0")
    w0 = float(snap.degree[x0])
    threshold = seq.snapshot_at(s_anchor).volume / 2.0
    run = SizeBiasedRun(x0=x0, T=T, n_replicates=n_replicates, seed=seed,
                        alpha=alpha, s_anchor=s_anchor, event_threshold=threshold)
    rng = _chunk_rng(seed, 0)
    S = np.zeros((n_replicates, snap.n_vertices), dtype=bool)
    S[:, snap.index_of[x0]] = True
    w = np.full(n_replicates, w0)
    runmax = w.copy()
    for t in range(T + 1):
        ok = runmax <= threshold
        if t >= s_anchor:
            with np.errstate(divide="ignore"):
                z = np.where((w > 0) & ok, w ** (alpha - 1), 0.0) * (w / w0) * ok
            run.L[t] = (float(z.mean()), float(z.std(ddof=1) / math.sqrt(len(z))))
        run.weight_mean[t] = float((w / w0).mean())
        run.extinct_frac[t] = float((w == 0).mean())
        if keep_weights:
            run.weights[t] = w.copy()
            run.event_ok[t] = ok.copy()
        if t == T:
            break
        cur = seq.snapshot_at(t)
        if cur is not snap:
            S = _embed_members(S, snap, cur)
            snap = cur
        nxt = seq.snapshot_at(t + 1)
        M = _dense_mult(snap, nxt)
        deg1 = np.array([nxt.degree[v] for v in nxt.vertex_ids], dtype=np.float64)
        ratio = (S.astype(np.float64) @ M) / deg1
        if ratio.max() > 1 + RATIO_TOL:
            raise MonotonicityError(f"membership ratio {ratio.max():.6g} > 1 at t={t}")
        U = rng.random(n_replicates)
        S = ratio > U[:, None]
        snap = nxt
        w = S.astype(np.float64) @ deg1
        runmax = np.maximum(runmax, w)
    return run
