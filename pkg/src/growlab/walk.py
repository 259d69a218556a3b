"""Time-inhomogeneous walk: exact kernel products, Monte Carlo, return stats.

The walk at step t uses the snapshot at time t, so a distribution over V_t
pushes forward to one over V_t (supported inside V_{t+1} by monotonicity).
Float evolutions renormalize, loudly, when mass drifts beyond tolerance;
rational evolutions are exact and reserved for small graphs.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _core
from .errors import BudgetExceededError
from .graph import relative_boundary

DEFAULT_STATE_CAP = 500_000
DEFAULT_STEP_BUDGET = 10 ** 9
RENORM_TOL = 1e-12
RATIONAL_STATE_CAP = 64


@dataclass
class DistributionVector:
    """Probability vector over a snapshot's vertices at one time."""

    t: int
    snapshot: object
    probs: np.ndarray
    renormalized: bool = False

    def prob(self, y):
        i = self.snapshot.index_of.get(y)
        return 0.0 if i is None else float(self.probs[i])

    def as_dict(self):
        return {v: float(self.probs[i]) for i, v in enumerate(self.snapshot.vertex_ids)
                if self.probs[i] > 0}

    def mass(self):
        return float(self.probs.sum())


def step_kernel(snapshot, x):
    """One-step transition row at x: {y: pi(x,y)/pi(x)} as exact fractions."""
    if x not in snapshot.index_of:
        raise ValueError(f"vertex {x} is not in the snapshot")
    d = snapshot.degree[x]
    row = {}
    for (a, b), m in snapshot.multiplicity.items():
        if a == x:
            row[b] = row.get(b, 0) + m
        elif b == x:
            row[a] = row.get(a, 0) + m
    return {y: Fraction(m, d) for y, m in row.items()}


def _embed(probs, old_snap, new_snap):
    """Re-express a distribution on old_snap in new_snap's index space."""
    if new_snap is old_snap:
        return probs
    out = np.zeros(new_snap.n_vertices)
    pos = np.array([new_snap.index_of[v] for v in old_snap.vertex_ids], dtype=np.int64)
    out[pos] = probs
    return out


@dataclass
class EvolveResult:
    x0: int
    start_time: int
    distributions: dict
    renormalizations: list = field(default_factory=list)

    def prob(self, t, y):
        return self.distributions[t].prob(y)


def evolve_exact(seq, x0, T, *, start_time=0, record_times=None,
                 state_cap=DEFAULT_STATE_CAP, renorm_tol=RENORM_TOL):
    """Exact forward kernel products from a point mass at (start_time, x0).

    Returns distributions at every recorded time (default: all of
    start_time..start_time+T).  Mass is conserved up to float rounding; any
    renormalization beyond `renorm_tol` is recorded in the result, never
    silent.
    """
    record = set(range(start_time, start_time + T + 1)) if record_times is None \
        else set(record_times)
    snap = seq.snapshot_at(start_time)
    _check_states(snap, state_cap, start_time)
    if x0 not in snap.index_of:
        raise ValueError(f"start vertex {x0} not present at t={start_time}")
    p = np.zeros(snap.n_vertices)
    p[snap.index_of[x0]] = 1.0
    res = EvolveResult(x0=x0, start_time=start_time, distributions={})
    renormed = False
    for t in range(start_time, start_time + T + 1):
        # the time-t distribution lives on the time-t snapshot (its support is
        # inside the previous vertex set by monotonicity)
        cur = seq.snapshot_at(t)
        _check_states(cur, state_cap, t)
        p = _embed(p, snap, cur)
        snap = cur
        if t in record:
            res.distributions[t] = DistributionVector(t, snap, p.copy(), renormed)
        if t == start_time + T:
            break
        indptr, indices, prob, _ = snap.csr()
        p = np.asarray(_core.evolve_csr(indptr, indices, prob, p))
        drift = abs(p.sum() - 1.0)
        renormed = drift > renorm_tol
        if renormed:
            res.renormalizations.append((t + 1, drift))
            p /= p.sum()
    return res


def evolve_exact_rational(seq, x0, T, *, start_time=0, state_cap=RATIONAL_STATE_CAP):
    """Exact rational evolution for small graphs; returns {t: {vertex: Fraction}}."""
    snap = seq.snapshot_at(start_time)
    _check_states(snap, state_cap, start_time, kind="rational-mode state")
    p = {x0: Fraction(1)}
    out = {start_time: dict(p)}
    rows = {}
    for t in range(start_time, start_time + T):
        snap = seq.snapshot_at(t)
        _check_states(snap, state_cap, t, kind="rational-mode state")
        key = id(snap)
        if key not in rows:
            rows[key] = {x: step_kernel(snap, x) for x in snap.vertex_ids}
        row = rows[key]
        nxt = {}
        for x, px in p.items():
            for y, k in row[x].items():
                nxt[y] = nxt.get(y, Fraction(0)) + px * k
        assert sum(nxt.values()) == 1
        p = nxt
        out[t + 1] = dict(p)
    return out


def _check_states(snap, cap, t, kind="state"):
    if snap.n_vertices > cap:
        raise BudgetExceededError(
            f"{kind} count {snap.n_vertices} at t={t} exceeds cap {cap}",
            budget=cap, requested=snap.n_vertices, at=t)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class SimulationResult:
    n_replicates: int
    seed: int
    marginal_counts: dict = field(default_factory=dict)   # t -> (snapshot, counts)
    visit_stats: dict = field(default_factory=dict)       # k -> moment dict
    paths: np.ndarray | None = None

    def marginal(self, t):
        snap, counts = self.marginal_counts[t]
        return snap, counts / counts.sum()


def _chunk_rng(seed, chunk_index):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(ss))


def simulate(seq, x0, T, n_replicates, seed, *, record_times=(),
             visit_checkpoints=(), return_paths=False, chunk_size=65536,
             step_budget=DEFAULT_STEP_BUDGET, state_cap=DEFAULT_STATE_CAP):
    """Replicate-parallel walk sampling with a counter-based seeded RNG.

    Replicates are partitioned into fixed-size chunks; chunk c draws from a
    Philox stream keyed by (seed, c), so results are reproducible and
    independent of how chunks are scheduled.  Records marginal counts at
    `record_times`, and per-walker visit-count moments to x0 (N_0, counting
    t=0) at each checkpoint in `visit_checkpoints`.
    """
    if n_replicates * T > step_budget:
        raise BudgetExceededError(
            f"n_replicates*T = {n_replicates * T} exceeds step budget {step_budget}",
            budget=step_budget, requested=n_replicates * T)
    record = set(record_times)
    checkpoints = sorted(set(visit_checkpoints))
    res = SimulationResult(n_replicates=n_replicates, seed=seed)
    if return_paths:
        res.paths = np.empty((n_replicates, T + 1), dtype=np.int64)
    moment_acc = {k: np.zeros(3) for k in checkpoints}  # sums of N, N^2, N^4
    count_acc = {}
    samplers = {}
    offset = 0
    chunk_index = 0
    while offset < n_replicates:
        m = min(chunk_size, n_replicates - offset)
        rng = _chunk_rng(seed, chunk_index)
        snap = seq.snapshot_at(0)
        _check_states(snap, state_cap, 0)
        if x0 not in snap.index_of:
            raise ValueError(f"start vertex {x0} not present at t=0")
        pos = np.full(m, snap.index_of[x0], dtype=np.int64)
        visits = np.ones(m, dtype=np.int64)
        if return_paths:
            res.paths[offset:offset + m, 0] = x0
        for t in range(T + 1):
            # positions at time t live in the time-t snapshot's index space
            cur = seq.snapshot_at(t)
            if cur is not snap:
                _check_states(cur, state_cap, t)
                remap = np.array([cur.index_of[v] for v in snap.vertex_ids],
                                 dtype=np.int64)
                pos = remap[pos]
                snap = cur
            if t in record:
                _acc_counts(count_acc, t, snap, pos)
            if t in moment_acc:
                v = visits.astype(np.float64)
                moment_acc[t] += (v.sum(), (v ** 2).sum(), (v ** 4).sum())
            if t == T:
                break
            key = id(snap)
            if key not in samplers:
                indptr, indices, _, cdf = snap.csr()
                samplers[key] = _core.StepSampler(indptr, indices, cdf)
            pos = samplers[key].step(pos, rng.random(m))
            visits += pos == snap.index_of[x0]
            if return_paths:
                ids = np.asarray(snap.vertex_ids, dtype=np.int64)
                res.paths[offset:offset + m, t + 1] = ids[pos]
        offset += m
        chunk_index += 1
    for k, (s1, s2, s4) in moment_acc.items():
        n = n_replicates
        mean = s1 / n
        mean_sq = s2 / n
        var = max(mean_sq - mean ** 2, 0.0)
        var_sq = max(s4 / n - mean_sq ** 2, 0.0)
        res.visit_stats[k] = {
            "e_n0": mean, "se_n0": math.sqrt(var / n),
            "e_n0_sq": mean_sq, "se_n0_sq": math.sqrt(var_sq / n),
            "pz_ratio": mean ** 2 / mean_sq if mean_sq > 0 else 1.0,
        }
    res.marginal_counts = count_acc
    return res


def _acc_counts(acc, t, snap, pos):
    c = np.bincount(pos, minlength=snap.n_vertices).astype(np.float64)
    if t in acc:
        acc[t] = (snap, acc[t][1] + c)
    else:
        acc[t] = (snap, c)


def simulate_paths(seq, x0, T, n_replicates, seed, **kw):
    """Full sampled paths (replicates x T+1), vertex ids."""
    res = simulate(seq, x0, T, n_replicates, seed, return_paths=True,
                   chunk_size=n_replicates, **kw)
    return res.paths


# ---------------------------------------------------------------------------
# Return statistics


@dataclass
class ReturnStats:
    k: int
    e_n0: float
    e_n0_sq: float
    pz_ratio: float
    mode: str = "exact"
    se_n0: float = 0.0
    se_n0_sq: float = 0.0


def return_stats_exact(seq, x0, k, *, state_cap=DEFAULT_STATE_CAP,
                       step_budget=DEFAULT_STEP_BUDGET):
    """Exact E[N_0(k)], E[N_0(k)^2] and the second-moment ratio.

    The square needs P(s,x0;t,x0) for all s <= t <= k, computed by restarted
    exact evolutions from each (s, x0): k+1 evolutions in total.
    """
    n_est = seq.snapshot_at(k).n_vertices
    if (k + 1) * k // 2 * max(n_est, 1) > step_budget:
        raise BudgetExceededError(
            f"restarted exact evolutions for k={k} exceed the step budget; "
            "use the Monte Carlo estimator", budget=step_budget)
    diag = {}
    for s in range(k + 1):
        ev = evolve_exact(seq, x0, k - s, start_time=s, state_cap=state_cap)
        diag[s] = [ev.prob(t, x0) for t in range(s, k + 1)]
    e_n0 = sum(diag[0])
    e_sq = 0.0
    for s in range(k + 1):
        p_s = diag[0][s]
        e_sq += p_s * (1.0 + 2.0 * sum(diag[s][1:]))
    return ReturnStats(k=k, e_n0=e_n0, e_n0_sq=e_sq,
                       pz_ratio=e_n0 ** 2 / e_sq if e_sq > 0 else 1.0)


def return_stats_mc(seq, x0, checkpoints, n_replicates, seed, **kw):
    """Monte Carlo return-count statistics at each checkpoint horizon."""
    res = simulate(seq, x0, max(checkpoints), n_replicates, seed,
                   visit_checkpoints=checkpoints, **kw)
    out = {}
    for k, st in res.visit_stats.items():
        out[k] = ReturnStats(k=k, e_n0=st["e_n0"], e_n0_sq=st["e_n0_sq"],
                             pz_ratio=st["pz_ratio"], mode="mc",
                             se_n0=st["se_n0"], se_n0_sq=st["se_n0_sq"])
    return out


# ---------------------------------------------------------------------------
# Hitting times and laws on a frozen snapshot


@dataclass
class HittingTailReport:
    region_volume: int
    time_unit: float
    s_grid: list
    tail: list
    tail_se: list
    fitted_rate: float
    r_squared: float
    n_censored: int


def hitting_times_mc(snapshot, H, x, n_replicates, seed, max_steps):
    """Sampled first hitting times of the inner boundary of H, from x."""
    H = set(H)
    boundary = relative_boundary(H, snapshot)
    if not boundary:
        raise ValueError("H has no inner boundary (H covers every vertex); "
                         "the hitting time is undefined")
    if x not in H:
        raise ValueError("start vertex must lie in H")
    b_idx = np.zeros(snapshot.n_vertices, dtype=bool)
    for z in boundary:
        b_idx[snapshot.index_of[z]] = True
    indptr, indices, _, cdf = snapshot.csr()
    sampler = _core.StepSampler(indptr, indices, cdf)
    rng = _chunk_rng(seed, 0)
    pos = np.full(n_replicates, snapshot.index_of[x], dtype=np.int64)
    tau = np.full(n_replicates, -1, dtype=np.int64)
    hit = b_idx[pos]
    tau[hit] = 0
    alive = ~hit
    for t in range(1, max_steps + 1):
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        pos[idx] = sampler.step(pos[idx], rng.random(idx.size))
        now = b_idx[pos[idx]]
        tau[idx[now]] = t
        alive[idx[now]] = False
    return tau  # -1 marks censored (still inside after max_steps)


def hitting_time_tail(snapshot, H, x, s_grid, *, n_replicates=10 ** 4, seed=0,
                      eps=0.5, at_time=0):
    """Empirical tail of tau_H at thresholds s * v(H)/(log v(H))^(2+eps).

    Accepts a snapshot or a sequence (frozen at `at_time`).  Fits an
    exponential rate to log tail versus s by least squares over the grid
    points with nonzero tail estimates.
    """
    if hasattr(snapshot, "snapshot_at"):
        snapshot = snapshot.snapshot_at(at_time)
    H = set(H)
    if not H <= set(snapshot.vertex_ids):
        raise ValueError("H must be a subset of the snapshot's vertices")
    v_h = sum(snapshot.degree[z] for z in H)
    unit = v_h / math.log(v_h) ** (2 + eps) if v_h > 1 else 1.0
    thresholds = [s * unit for s in s_grid]
    max_steps = int(math.ceil(max(thresholds))) + 1
    tau = hitting_times_mc(snapshot, H, x, n_replicates, seed, max_steps)
    censored = int((tau < 0).sum())
    tail, tail_se = [], []
    for thr in thresholds:
        exceeded = (tau < 0) | (tau > thr)
        p = exceeded.mean()
        tail.append(float(p))
        tail_se.append(math.sqrt(p * (1 - p) / n_replicates))
    pts = [(s, math.log(p)) for s, p in zip(s_grid, tail) if p > 0]
    rate, r2 = float("nan"), float("nan")
    if len(pts) >= 2:
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        slope, intercept = np.polyfit(xs, ys, 1)
        pred = slope * xs + intercept
        ss_res = float(((ys - pred) ** 2).sum())
        ss_tot = float(((ys - ys.mean()) ** 2).sum())
        rate = -float(slope)
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return HittingTailReport(region_volume=v_h, time_unit=unit, s_grid=list(s_grid),
                             tail=tail, tail_se=tail_se, fitted_rate=rate,
                             r_squared=r2, n_censored=censored)


def hitting_law_mc(snapshot, H, starts, n_replicates, seed, max_steps):
    """Per-start empirical distribution of the boundary vertex first hit."""
    laws = {}
    for i, x in enumerate(starts):
        boundary = relative_boundary(set(H), snapshot)
        if not boundary:
            raise ValueError("H has no inner boundary; hitting laws undefined")
        b_idx = np.zeros(snapshot.n_vertices, dtype=bool)
        for z in boundary:
            b_idx[snapshot.index_of[z]] = True
        indptr, indices, _, cdf = snapshot.csr()
        sampler = _core.StepSampler(indptr, indices, cdf)
        rng = _chunk_rng(seed, i)
        pos = np.full(n_replicates, snapshot.index_of[x], dtype=np.int64)
        alive = ~b_idx[pos]
        for _ in range(max_steps):
            if not alive.any():
                break
            idx = np.nonzero(alive)[0]
            pos[idx] = sampler.step(pos[idx], rng.random(idx.size))
            alive[idx] = ~b_idx[pos[idx]]
        hits = pos[~alive]
        counts = np.bincount(hits, minlength=snapshot.n_vertices)
        laws[x] = {snapshot.vertex_ids[j]: counts[j] / hits.size
                   for j in np.nonzero(counts)[0]}
    return laws


def hitting_law_ratio(laws):
    """max over boundary vertices of the pairwise ratio of two hitting laws."""
    (la, lb) = list(laws.values())[:2]
    common = set(la) & set(lb)
    if not common:
        return float("inf")
    return max(max(la[z] / lb[z], lb[z] / la[z]) for z in common)


# ---------------------------------------------------------------------------
# On-diagonal lower bound on a frozen snapshot


@dataclass
class OnDiagReport:
    T: int
    worst_margin: float
    worst_case: tuple | None

    @property
    def ok(self):
        return self.worst_margin >= -1e-12


def on_diag_lower_check(snapshot, T):
    """Verify P_x(Y_{2t} = x) >= pi(x)/pi(H) for all x, t <= T, exactly.

    Uses dense kernel powers on the frozen snapshot; only even times are
    checked (odd times fail on bipartite graphs, as they must).
    """
    n = snapshot.n_vertices
    K = np.zeros((n, n))
    indptr, indices, prob, _ = snapshot.csr()
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            K[i, indices[k]] = prob[k]
    floor = np.array([snapshot.degree[v] for v in snapshot.vertex_ids],
                     dtype=np.float64) / snapshot.volume
    M = np.eye(n)
    worst = math.inf
    worst_case = None
    for step in range(1, 2 * T + 1):
        M = M @ K
        if step % 2 == 0:
            margins = np.diag(M) - floor
            i = int(np.argmin(margins))
            if margins[i] < worst:
                worst = float(margins[i])
                worst_case = (step, snapshot.vertex_ids[i])
    return OnDiagReport(T=T, worst_margin=worst, worst_case=worst_case)
