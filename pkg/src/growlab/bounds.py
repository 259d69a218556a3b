"""Transition-probability upper bounds, transience criteria, and lower-bound
verification experiments.

The level iteration solves, per step u, for the largest level whose decay
integral against the profile reaches one; with a flat profile this reduces
exactly to multiplication by exp(-c+ Phi^2).  The two-term bound at horizon t
minimizes over anchor times s; its uniform-degree corollary uses the explicit
constant C = max(2*Delta, sqrt(Delta)).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .isoperimetry import DECAY_FLOOR
from .walk import evolve_exact, _chunk_rng


@dataclass
class BoundParams:
    """Laziness/interpolation parameters and their derived constants."""

    alpha: float = 0.5
    gamma: float = 0.5
    delta_cap: int | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.gamma <= 0.5:
            raise ValueError("gamma must lie in (0, 1/2]")

    @property
    def c_plus(self):
        g = self.gamma
        return 2 * self.alpha * (1 - self.alpha) * g * g / (1 - g) ** 2

    @property
    def c_star(self):
        g = self.gamma
        return g * g / (2 * (1 - g) ** 2)


@dataclass
class LTrajectory:
    s: int
    values: list
    floored: bool = False

    def at(self, u):
        return self.values[u - self.s]


def iterate_L(profiles, params, s, t, x0_degree):
    """Level trajectory L^(s)_s..L^(s)_t driven by per-step profiles.

    profiles(u) must return a profile object for each u in [s, t-1].  Where a
    profile is infinite on the whole admissible range the decay is formally
    infinite; the trajectory is floored at a tiny positive value and flagged.
    """
    L = x0_degree ** (params.alpha - 1)
    values = [L]
    floored = False
    for u in range(s, t):
        if L <= 2 * DECAY_FLOOR:
            values.append(L)
            continue
        nxt = profiles(u).decay_invert(L / 2, params.c_plus, params.alpha)
        if nxt is None:
            L = DECAY_FLOOR
            floored = True
        else:
            L = 2 * nxt
        values.append(L)
    return LTrajectory(s=s, values=values, floored=floored)


class LTable:
    """Lazy cache of level trajectories keyed by anchor time s."""

    def __init__(self, profiles, params, x0_degree, t_max):
        self.profiles = profiles
        self.params = params
        self.x0_degree = x0_degree
        self.t_max = t_max
        self._rows = {}

    def value(self, s, t):
        row = self._rows.get(s)
        if row is None:
            row = iterate_L(self.profiles, self.params, s, self.t_max, self.x0_degree)
            self._rows[s] = row
        return row.at(t)


def default_s_grid(t, dense_limit=512, points=64):
    """All anchors for small horizons, a log-spaced subset beyond."""
    if t - 1 <= dense_limit:
        return list(range(1, t))
    grid = np.unique(np.geomspace(1, t - 1, num=points).astype(int))
    return [int(s) for s in grid]


def first_bound(seq, x0, y, t, params, profiles, *, s_grid=None, l_table=None):
    """Two-term bound minimized over anchors: returns (value, argmin_s)."""
    if t < 2:
        raise ValueError("the bound needs t >= 2")
    if l_table is None:
        l_table = LTable(profiles, params, seq.snapshot_at(0).degree[x0], t)
    pi_y = seq.snapshot_at(t).degree[y]
    best, best_s = math.inf, None
    for s in s_grid or default_s_grid(t):
        val = 2 * pi_y / seq.volume_at(s) + pi_y ** (1 - params.alpha) * l_table.value(s, t)
        if val < best:
            best, best_s = val, s
    return best, best_s


def first_bounds_at(seq, x0, t, params, profiles, *, ys=None, l_table=None,
                    s_grid=None):
    """first_bound for every y at one horizon, sharing the level table."""
    if l_table is None:
        l_table = LTable(profiles, params, seq.snapshot_at(0).degree[x0], t)
    snap = seq.snapshot_at(t)
    ys = snap.vertex_ids if ys is None else ys
    grid = s_grid or default_s_grid(t)
    vols = np.array([seq.volume_at(s) for s in grid], dtype=np.float64)
    levels = np.array([l_table.value(s, t) for s in grid])
    out = {}
    for y in ys:
        pi_y = snap.degree[y]
        vals = 2 * pi_y / vols + pi_y ** (1 - params.alpha) * levels
        i = int(np.argmin(vals))
        out[y] = (float(vals[i]), grid[i])
    return out


def second_bound(seq, x0, t, params, cheeger_of):
    """Uniform-degree corollary C (1/v(t/2) + exp(-c* sum Phi_u^2)).

    cheeger_of(u) supplies Phi_u (exact or certified lower bound; a lower
    bound only weakens the decay term, keeping the bound valid).  Delta comes
    from params or the sequence's declared cap.
    """
    if t < 2:
        raise ValueError("the bound needs t >= 2")
    delta = params.delta_cap if params.delta_cap is not None else seq.delta_cap
    if delta is None:
        raise ValueError("a uniform degree bound Delta is required")
    C = max(2 * delta, math.sqrt(delta))
    half = t // 2
    decay = sum(min(cheeger_of(u), 1.0) ** 2 for u in range(half, t))
    return C * (1.0 / seq.volume_at(half) + math.exp(-params.c_star * decay))


# ---------------------------------------------------------------------------
# Transience / recurrence reports


@dataclass
class SeriesDiagnostic:
    partial_sum: float
    tail_exponent: float
    flag: str


@dataclass
class TransienceReport:
    horizon: int
    inverse_volume: SeriesDiagnostic
    mixing: SeriesDiagnostic

    @property
    def transient_consistent(self):
        return (self.inverse_volume.flag == "consistent-with-convergence"
                and self.mixing.flag == "consistent-with-convergence")


def _power_series_diagnostic(terms, margin=0.05):
    """Flag sum(terms) by the fitted log-log slope of the terms' tail.

    The band is asymmetric: a fitted exponent of exactly -1 (harmonic tail)
    diverges, so only slopes clearly below -1 count as convergent.
    """
    terms = np.asarray(terms, dtype=np.float64)
    ts = np.arange(1, len(terms) + 1, dtype=np.float64)
    sel = (terms > 0) & (ts >= len(terms) / 2)
    if sel.sum() >= 2:
        slope = float(np.polyfit(np.log(ts[sel]), np.log(terms[sel]), 1)[0])
    elif not (terms > 0).any() or terms[ts >= len(terms) / 2].max() == 0:
        slope = -math.inf
    else:
        slope = math.nan
    if slope < -1 - margin:
        flag = "consistent-with-convergence"
    elif slope > -1 - margin / 5:
        flag = "consistent-with-divergence"
    else:
        flag = "inconclusive"
    return SeriesDiagnostic(partial_sum=float(terms.sum()), tail_exponent=slope,
                            flag=flag)


def _mixing_series_diagnostic(exponents, margin=0.05):
    """Flag sum(exp(-sigma_t)) from the growth of the exponents sigma_t.

    The series converges whenever sigma_t eventually exceeds (1+eps) log t,
    so the diagnostic fits p = dlog sigma/dlog t: polynomial growth (p bounded
    away from 0) is convergent regardless of the constant, while p near 0
    falls back to comparing sigma_t against log t.
    """
    sig = np.asarray(exponents, dtype=np.float64)
    ts = np.arange(1, len(sig) + 1, dtype=np.float64)
    sel = (sig > 0) & (ts >= len(sig) / 2)
    if not sel.any():
        return SeriesDiagnostic(partial_sum=float(np.exp(-sig).sum()),
                                tail_exponent=0.0,
                                flag="consistent-with-divergence")
    growth = float(np.polyfit(np.log(ts[sel]), np.log(sig[sel]), 1)[0]) \
        if sel.sum() >= 2 else 0.0
    t_last = len(sig)
    zeta = sig[-1] / math.log(t_last) if t_last > 1 else math.inf
    if growth >= margin or zeta > 1 + margin:
        flag = "consistent-with-convergence"
    elif zeta < 1 - margin:
        flag = "consistent-with-divergence"
    else:
        flag = "inconclusive"
    return SeriesDiagnostic(partial_sum=float(np.exp(-sig).sum()),
                            tail_exponent=growth, flag=flag)


def transience_report(seq, horizon, *, cheeger_of=None, volumes=None, cheegers=None):
    """Partial sums of 1/v(t) and of the mixing series, with decay-rate flags.

    Flags state consistency with convergence or divergence from fitted decay
    rates, never a proof-grade verdict.  Synthetic schedules can be passed
    directly via volumes/cheegers arrays (indexed by t, entry 0 unused for
    volumes).
    """
    if volumes is None:
        volumes = [seq.volume_at(t) for t in range(horizon + 1)]
    if cheegers is None:
        cheegers = [min(cheeger_of(u), 1.0) if cheeger_of else 0.0
                    for u in range(horizon + 1)]
    inv = [1.0 / volumes[t] for t in range(1, horizon + 1)]
    csq = np.asarray([c ** 2 for c in cheegers])
    cum = np.concatenate([[0.0], np.cumsum(csq)])
    sigmas = [float(cum[t] - cum[t // 2]) for t in range(1, horizon + 1)]
    return TransienceReport(horizon=horizon,
                            inverse_volume=_power_series_diagnostic(inv),
                            mixing=_mixing_series_diagnostic(sigmas))


@dataclass
class PhaseVerdict:
    d: int
    beta: float
    classification: str
    witness_alpha: float | None = None


def zd_phase(d, beta):
    """Growth-exponent phase classification for lattice domains, d > 2.

    beta in (1, d/2): the Cheeger series already converges = second-bound
    route.  beta >= d/2: the full profile with any alpha < 1 - 2/d makes the
    bound summable = first-bound route.  beta <= 1: the volume series itself
    diverges and the upper bounds are silent.
    """
    if d <= 2:
        raise ValueError("the classification needs d > 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if beta <= 1:
        return PhaseVerdict(d, beta, "upper-bounds-silent")
    if beta < d / 2:
        return PhaseVerdict(d, beta, "transient-via-second-bound")
    return PhaseVerdict(d, beta, "transient-via-first-bound",
                        witness_alpha=(1 - 2 / d) / 2)


# ---------------------------------------------------------------------------
# Lower-bound stability check


@dataclass
class LowerBoundRow:
    t: int
    window_radius: int
    n_admissible: int
    min_v_times_p: float | None
    ball_deficit: float = 0.0   # (v(t) - v(B(x0, r(t))))/v(t), a diagnostic


@dataclass
class LowerBoundReport:
    rows: list
    c_hat: float
    stability_ratio: float
    zeta: list = field(default_factory=list)
    empty_windows: list = field(default_factory=list)


def _inverse_of_sum(r_func, psi, t, m_cap=10 ** 6):
    """max m >= 0 with r^(-1)(m) + psi(m) <= t, by monotone search."""
    def g(m):
        lo, hi = 0, 1
        while r_func(hi) < m:
            hi *= 2
            if hi > 10 ** 12:
                return math.inf
        while lo < hi:
            mid = (lo + hi) // 2
            if r_func(mid) >= m:
                hi = mid
            else:
                lo = mid + 1
        return lo + psi(m)

    m = 0
    while m + 1 <= m_cap and g(m + 1) <= t:
        m += 1
    return m


def lower_bound_check(seq, x0, psi, r_func, delta0, t_grid, *, cheeger_of=None,
                      state_cap=500_000):
    """Scan of min over admissible y of v(t) P(0,x0;t,y) on a time grid.

    Admissible targets lie within graph distance (1-delta0) * (r^(-1)+psi)^(-1)(t)
    of the start; distances use lattice coordinates when the snapshots carry
    them, else breadth-first search.  Reports the running minimum and its
    max/min ratio over the upper half of the grid.
    """
    t_grid = sorted(t_grid)
    ev = evolve_exact(seq, x0, max(t_grid), record_times=t_grid,
                      state_cap=state_cap)
    rows = []
    empty = []
    mins = []
    for t in t_grid:
        m_star = _inverse_of_sum(r_func, psi, t)
        radius = int((1 - delta0) * m_star)
        dist = ev.distributions[t]
        snap = dist.snapshot
        v = snap.volume
        ball_vol = sum(snap.degree[y] for y in _vertices_within(snap, x0, r_func(t)))
        deficit = (v - ball_vol) / v if v else 0.0
        adm = _vertices_within(snap, x0, radius)
        if not adm:
            empty.append(t)
            rows.append(LowerBoundRow(t, radius, 0, None, deficit))
            continue
        m = min(v * dist.prob(y) for y in adm)
        mins.append(m)
        rows.append(LowerBoundRow(t, radius, len(adm), m, deficit))
    c_hat = min(mins) if mins else math.nan
    upper = [r.min_v_times_p for r in rows[len(rows) // 2:]
             if r.min_v_times_p is not None]
    stability = max(upper) / min(upper) if upper and min(upper) > 0 else math.inf
    zeta = []
    if cheeger_of is not None:
        for t in t_grid:
            if t < 2:
                continue
            s = sum(min(cheeger_of(u), 1.0) ** 2 for u in range(t // 2, t))
            zeta.append((t, s / math.log(seq.volume_at(t // 2))))
    return LowerBoundReport(rows=rows, c_hat=c_hat, stability_ratio=stability,
                            zeta=zeta, empty_windows=empty)


def _vertices_within(snap, x0, radius):
    if snap.coords:
        c0 = np.asarray(snap.coords[x0])
        return [v for v in snap.vertex_ids
                if int(np.abs(np.asarray(snap.coords[v]) - c0).sum()) <= radius]
    dist = {x0: 0}
    frontier = [x0]
    while frontier:
        nxt = []
        for v in frontier:
            for w in snap.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    if dist[w] < radius:
                        nxt.append(w)
        frontier = nxt
    return [v for v, d in dist.items() if d <= radius]


# ---------------------------------------------------------------------------
# Frozen-stage recurrence experiment


@dataclass
class StageRow:
    l: int
    t_start: int
    t_end: int
    volume: int
    floor: float            # (t_{l+1} - t_l) / v(t_l)
    local_time_mean: float
    local_time_se: float
    fitted_const: float


@dataclass
class FrozenRecurrenceReport:
    stages: list
    partial_sums: list
    rank_correlation: float


def frozen_recurrence_experiment(seq, n_replicates=200, seed=0, *, max_stage=None):
    """Per-stage time at the start vertex versus the duration/volume floor.

    Walkers run through the whole frozen-stage sequence; each stage
    contributes its mean local time at x0, compared (up to a fitted constant)
    with (t_{l+1}-t_l)/v(t_l), and the partial sums of those floors.
    """
    stages = seq.meta["stages"]
    if max_stage is not None:
        stages = stages[:max_stage + 1]
    x0 = 0
    snap = seq.snapshot_at(0)
    pos = np.full(n_replicates, snap.index_of[x0], dtype=np.int64)
    rng = _chunk_rng(seed, 0)
    rows = []
    psums = []
    running = 0.0
    for st in stages:
        t0, t1 = st["t_start"], st["t_end"]
        if t1 is None:
            t1 = seq.horizon
        cur = seq.snapshot_at(t0)
        if cur is not snap:
            remap = np.array([cur.index_of[v] for v in snap.vertex_ids],
                             dtype=np.int64)
            pos = remap[pos]
            snap = cur
        indptr, indices, _, cdf = snap.csr()
        sampler = _core.StepSampler(indptr, indices, cdf)
        x0_idx = snap.index_of[x0]
        visits = np.zeros(n_replicates, dtype=np.int64)
        duration = t1 - t0
        if duration > 0:
            visits += pos == x0_idx  # time t0 itself
            for _ in range(duration - 1):
                pos = sampler.step(pos, rng.random(n_replicates))
                visits += pos == x0_idx
            pos = sampler.step(pos, rng.random(n_replicates))  # step into t1
        floor = duration / st["volume"]
        mean = float(visits.mean())
        se = float(visits.std(ddof=1) / math.sqrt(n_replicates))
        running += floor
        psums.append(running)
        rows.append(StageRow(l=st["l"], t_start=t0, t_end=t1, volume=st["volume"],
                             floor=floor, local_time_mean=mean, local_time_se=se,
                             fitted_const=mean / floor if floor > 0 else math.nan))
    valid = [r for r in rows if r.floor > 0]
    corr = _spearman([r.floor for r in valid], [r.local_time_mean for r in valid])
    return FrozenRecurrenceReport(stages=rows, partial_sums=psums,
                                  rank_correlation=corr)


def _spearman(xs, ys):
    if len(xs) < 2:
        return math.nan
    rx = np.argsort(np.argsort(xs)).astype(np.float64)
    ry = np.argsort(np.argsort(ys)).astype(np.float64)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt((rx ** 2).sum() * (ry ** 2).sum())
    return float((rx * ry).sum() / denom) if denom > 0 else math.nan
