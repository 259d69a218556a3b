"""The acceptance suite: eleven checks with pinned tolerances and scales.

Each criterion is a standalone function returning a CriterionResult; run_all
executes them in order and the CLI/tests render one pass/fail line each.
Checks 6 and 8 assert quantitative merging/excursion targets at their pinned
drift parameters; see their docstrings for what they require.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import (
    BoundParams,
    LTable,
    first_bounds_at,
    iterate_L,
    lower_bound_check,
    second_bound,
    zd_phase,
)
from .evoset import run_plain
from .families import (
    growing_path_family,
    lattice_ball_family,
    path_snapshot,
    two_vertex_frozen,
)
from .graph import GraphSnapshot
from .isoperimetry import (
    ConstantProfile,
    analytic_profile,
    dominates,
    exact_profile,
    profile_provider,
)
from .merging import certify_constraints, excursion_tail, merging_distances, merging_time_tv, two_state_analysis
from .walk import evolve_exact, on_diag_lower_check, return_stats_mc


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    runtime_s: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] C{self.cid:<2d} {self.title} ({self.runtime_s:.1f}s)"


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.time()
        res = fn(*a, **kw)
        res.runtime_s = time.time() - t0
        return res
    return wrapper


def _test_families():
    return [("two_vertex", two_vertex_frozen()),
            ("growing_path", growing_path_family((4, 6, 8), (0, 4, 8), loops=1))]


@_timed
def criterion_1(n_replicates=10 ** 5, seed=101):
    """Identity linking set membership to walk probabilities, within 3 SE.

    On the frozen two-vertex graph and the growing path family, for all
    t <= 10 and all y, the membership-based estimate of the t-step transition
    probability must match exact kernel products; standard errors are
    evaluated under the exact probability, and vertices with exact
    probability zero must never be sampled.
    """
    worst_z = 0.0
    worst_at = None
    ok = True
    for name, seq in _test_families():
        run = run_plain(seq, 0, 10, n_replicates, seed)
        ev = evolve_exact(seq, 0, 10)
        w0 = seq.snapshot_at(0).degree[0]
        for t in range(11):
            dist = ev.distributions[t]
            snap = dist.snapshot
            for y in snap.vertex_ids:
                exact = dist.prob(y)
                scale = snap.degree[y] / w0
                exact_member = exact / scale
                est_member, _ = run.membership(t, y)
                if exact_member == 0:
                    if est_member != 0:
                        ok = False
                        worst_at = (name, t, y, "positive estimate at exact zero")
                    continue
                se = math.sqrt(exact_member * (1 - exact_member) / n_replicates)
                z = abs(est_member - exact_member) / se if se > 0 else 0.0
                if z > worst_z:
                    worst_z, worst_at = z, (name, t, y)
    ok = ok and worst_z <= 3.0
    return CriterionResult(1, "evolving-set identity vs exact products (3 SE)",
                           ok, details={"worst_z": worst_z, "worst_at": str(worst_at)})


@_timed
def criterion_2(n_replicates=10 ** 5, seed=102):
    """Weight-sequence martingale: mean stays at the start weight within 3 SE."""
    worst_z = 0.0
    worst_at = None
    for name, seq in _test_families():
        run = run_plain(seq, 0, 20, n_replicates, seed)
        w0 = run.start_weight
        for t in range(21):
            mean, se = run.weight_mean[t]
            z = abs(mean - w0) / se if se > 0 else 0.0
            if z > worst_z:
                worst_z, worst_at = z, (name, t)
    return CriterionResult(2, "weight martingale flat within 3 SE", worst_z <= 3.0,
                           details={"worst_z": worst_z, "worst_at": str(worst_at)})


@_timed
def criterion_3():
    """Upper bounds never undercut exact probabilities, on the full matrix.

    Frozen two-vertex graph for t <= 50 and the growing square-lattice ball
    family for t <= 200 (exact profiles up to 20 vertices, analytic beyond);
    every (t, y) must satisfy exact <= both bounds.
    """
    violations = 0
    n_checked = 0
    worst_margin = math.inf
    worst_at = None

    def scan(seq, x0, t_max):
        nonlocal violations, n_checked, worst_margin, worst_at
        prov = profile_provider(seq)
        params = BoundParams(alpha=0.5, gamma=float(seq.gamma), delta_cap=seq.delta_cap)
        ev = evolve_exact(seq, x0, t_max)
        table = LTable(prov, params, seq.snapshot_at(0).degree[x0], t_max)
        cheeger_of = lambda u: prov(u).cheeger
        for t in range(2, t_max + 1):
            fb = first_bounds_at(seq, x0, t, params, prov, l_table=table)
            sb = second_bound(seq, x0, t, params, cheeger_of)
            dist = ev.distributions[t]
            for y in dist.snapshot.vertex_ids:
                exact = dist.prob(y)
                margin = min(fb[y][0] - exact, sb - exact)
                n_checked += 1
                if margin < 0:
                    violations += 1
                if margin < worst_margin:
                    worst_margin, worst_at = margin, (t, y)

    scan(two_vertex_frozen(), 0, 50)
    scan(lattice_ball_family(2, 1.0, horizon=210), 0, 200)
    return CriterionResult(3, "bound soundness: exact <= first and second bounds",
                           violations == 0,
                           details={"n_checked": n_checked, "violations": violations,
                                    "worst_margin": worst_margin,
                                    "worst_at": str(worst_at)})


@_timed
def criterion_4():
    """Flat profiles reduce the level iteration to the closed exponential form."""
    worst = 0.0
    steps = 8
    grid = [(a, g, f) for a in (0.2, 0.35, 0.5, 0.65, 0.8)
            for g, f in ((0.1, 0.1), (0.25, 0.3), (0.4, 0.2), (0.5, 0.4))]
    assert len(grid) == 20
    for alpha, gamma, phi in grid:
        params = BoundParams(alpha=alpha, gamma=gamma)
        traj = iterate_L(lambda u: ConstantProfile(phi), params, 0, steps, 2)
        L0 = 2 ** (alpha - 1)
        for k, val in enumerate(traj.values):
            ref = L0 * math.exp(-params.c_plus * phi * phi * k)
            worst = max(worst, abs(val / ref - 1))
    return CriterionResult(4, "flat-profile closed form to 1e-8", worst <= 1e-8,
                           details={"worst_rel_err": worst, "grid_points": len(grid)})


def _random_connected_snapshot(rng, max_n=10):
    n = int(rng.integers(1, max_n + 1))
    edges = []
    if n == 1:
        edges.append((0, 0, int(rng.integers(1, 3))))
    else:
        for v in range(1, n):
            edges.append((int(rng.integers(0, v)), v, int(rng.integers(1, 3))))
        for _ in range(int(rng.integers(0, n + 1))):
            a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
            edges.append((a, b, int(rng.integers(1, 3))))
    return GraphSnapshot(edges)


@_timed
def criterion_5(seed=105):
    """Even-time on-diagonal floor pi(x)/pi(H) on 100 random graphs, t <= 50."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(100):
        snap = _random_connected_snapshot(rng)
        rep = on_diag_lower_check(snap, 50)
        worst = min(worst, rep.worst_margin)
    return CriterionResult(5, "on-diagonal lower bound, 100 random graphs",
                           worst >= -1e-12, details={"worst_margin": worst})


@_timed
def criterion_6():
    """Merging falsification at theta=eta=0.05: TV still >= 0.99 at 100 N^2.

    Requires (a) the envelope certificate, (b) exact TV between the two
    endpoint evolutions at t = 102400 (N = 32) at least 0.99, and (c)
    super-quadratic growth of the TV merging time over N in {12, 16, 20}.
    The drift of this schedule is second-order in the parameters
    (beta = -2 theta eta/(6-4 eta) ~ -8.6e-4 here), far too weak to trap the
    walkers at these sizes, so (b) and (c) fail; see the ledger analysis.
    """
    theta = eta = 0.05
    cert = certify_constraints(32, theta, eta)
    cert_ok = cert["detailed_balance_exact"] and cert["eps"] < 1 / 3
    rep = merging_distances(32, theta, eta, 100 * 32 * 32, delta=-1.0, record_cap=1)
    tv_ok = rep.final_tv >= 0.99
    times = {N: merging_time_tv(N, theta, eta, t_max=10 ** 6) for N in (12, 16, 20)}
    growth_ok = (times[12] is not None and times[20] is not None
                 and times[20] / times[12] > (20 / 12) ** 2)
    return CriterionResult(
        6, "merging falsification at pinned drift (TV >= 0.99 at 100 N^2)",
        cert_ok and tv_ok and growth_ok,
        details={"eps": cert["eps"], "certificate_ok": cert_ok,
                 "tv_at_102400": rep.final_tv, "tv_ok": tv_ok,
                 "merging_times": {str(k): v for k, v in times.items()},
                 "growth_ratio": (times[20] / times[12]
                                  if times[12] and times[20] else None),
                 "growth_needed": (20 / 12) ** 2, "growth_ok": growth_ok})


@_timed
def criterion_7():
    """Two-state analysis: beta(0.1, 0.1) = -1/280 exactly; beta < 0 on a grid."""
    ts = two_state_analysis(Fraction(1, 10), Fraction(1, 10))
    exact_ok = ts.beta == Fraction(-1, 280) and ts.stationary_exact
    grid_ok = True
    for i in range(1, 20):
        for j in range(1, 20):
            b = two_state_analysis(Fraction(i, 20), Fraction(j, 20)).beta
            if not b < 0:
                grid_ok = False
    return CriterionResult(7, "two-state drift: -1/280 exact, negative on grid",
                           exact_ok and grid_ok,
                           details={"beta_exact": str(ts.beta), "grid_ok": grid_ok})


@_timed
def criterion_8(n_replicates=10 ** 5, seed=108):
    """Excursion tails: drifted slope linear in N and 5x the null slope.

    At theta=eta=0.05 the fitted log-tail slope must be negative with
    R^2 >= 0.9 and at least five times the null model's slope in magnitude.
    At these parameters both tails are diffusion-dominated, so the contrast
    clause fails; see the ledger analysis.
    """
    grid = (8, 16, 24, 32)
    drift = excursion_tail(grid, 0.05, 0.05, n_replicates, seed)
    null = excursion_tail(grid, 0.0, 0.0, n_replicates, seed + 1)
    slope_ok = drift.slope < 0 and drift.r_squared >= 0.9
    contrast_ok = abs(drift.slope) >= 5 * abs(null.slope)
    return CriterionResult(
        8, "excursion tail: linear log-decay and 5x null contrast",
        slope_ok and contrast_ok,
        details={"drift_slope": drift.slope, "drift_r2": drift.r_squared,
                 "null_slope": null.slope, "slope_ok": slope_ok,
                 "contrast_ratio": (abs(drift.slope / null.slope)
                                    if null.slope else math.inf),
                 "contrast_ok": contrast_ok,
                 "drift_tails": drift.estimates, "null_tails": null.estimates})


@_timed
def criterion_9(n_replicates=10 ** 5, seed=109):
    """Phase classes plus the return-count growth contrast between exponents.

    zd_phase must place (3, 1.2), (4, 3), (3, 0.8) in their regions, and the
    Monte Carlo mean return count on the slow family (beta = 0.8) must grow
    from k = 1e3 to 1e4 by a factor at least 1.1 times the fast family's
    (beta = 1.2), d = 3.
    """
    p1 = zd_phase(3, 1.2).classification == "transient-via-second-bound"
    v2 = zd_phase(4, 3)
    p2 = (v2.classification == "transient-via-first-bound"
          and v2.witness_alpha is not None and 0 < v2.witness_alpha < 0.5)
    p3 = zd_phase(3, 0.8).classification == "upper-bounds-silent"
    growth = {}
    for beta in (0.8, 1.2):
        seq = lattice_ball_family(3, beta, horizon=10 ** 4 + 1)
        st = return_stats_mc(seq, 0, (10 ** 3, 10 ** 4), n_replicates, seed)
        growth[beta] = st[10 ** 4].e_n0 / st[10 ** 3].e_n0
    contrast_ok = growth[0.8] >= 1.1 * growth[1.2]
    return CriterionResult(
        9, "phase diagram and MC growth contrast",
        p1 and p2 and p3 and contrast_ok,
        details={"phases_ok": p1 and p2 and p3, "witness_alpha": v2.witness_alpha,
                 "growth_beta_0.8": growth[0.8], "growth_beta_1.2": growth[1.2],
                 "contrast_ok": contrast_ok})


@_timed
def criterion_10():
    """Scaled point-probability floor is stable on the slow-growing ball family.

    r(t) = ceil(t^(1/3)), quadratic space-time scaling, half-window: the
    minimum of v(t) P(0,x0;t,y) over admissible y must stay positive and vary
    by at most a factor 2 over t in [1000, 2000].
    """
    seq = lattice_ball_family(2, 2 / 3, horizon=2100)
    grid = list(range(1000, 2001, 100))
    rep = lower_bound_check(seq, 0, lambda m: m * m, seq.meta["radius"], 0.5, grid)
    mins = [r.min_v_times_p for r in rep.rows if r.min_v_times_p is not None]
    ok = (len(mins) == len(grid) and min(mins) > 0
          and max(mins) / min(mins) <= 2.0)
    return CriterionResult(10, "lower-bound stability within factor 2",
                           ok, details={"c_hat": rep.c_hat,
                                        "spread": max(mins) / min(mins) if mins else None,
                                        "n_grid": len(grid),
                                        "empty_windows": rep.empty_windows})


@_timed
def criterion_11():
    """Profile oracle: P4 bottleneck 1/3 with witness {0,1}; analytic domination."""
    p4 = path_snapshot(4)
    prof = exact_profile(p4)
    phi_ok = abs(prof.cheeger - 1 / 3) < 1e-15
    witness = cheeger_witness(p4)
    witness_ok = witness in ({0, 1}, {2, 3})
    dom_ok = True
    seq = lattice_ball_family(2, 1.0, horizon=10)
    for t in (1, 2, 3, 4):  # radii 1 and 2
        snap = seq.snapshot_at(t)
        if not dominates(exact_profile(snap), analytic_profile(seq, t)):
            dom_ok = False
    return CriterionResult(11, "isoperimetry oracle and analytic domination",
                           phi_ok and witness_ok and dom_ok,
                           details={"cheeger_p4": prof.cheeger,
                                    "witness": sorted(witness),
                                    "domination_ok": dom_ok})


def cheeger_witness(snapshot, cap=16):
    """A minimizing subset for the bottleneck ratio (small graphs only).

    Ties break toward the lexicographically smallest vertex set, so the
    witness is deterministic.
    """
    n = snapshot.n_vertices
    if n > cap:
        raise ValueError("witness search is exponential; graph too large")
    ids = snapshot.vertex_ids
    half = snapshot.volume // 2
    best_ratio = math.inf
    best_set = None
    for mask in range(1, 1 << n):
        A = {ids[i] for i in range(n) if mask >> i & 1}
        w = sum(snapshot.degree[v] for v in A)
        if w > half:
            continue
        cut = sum(m for (x, y), m in snapshot.multiplicity.items()
                  if x != y and (x in A) != (y in A))
        ratio = cut / w
        if ratio < best_ratio or (ratio == best_ratio and sorted(A) < sorted(best_set)):
            best_ratio, best_set = ratio, A
    return best_set


ALL_CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
                criterion_11]


def run_all(ids=None, verbose=True):
    """Run the acceptance checks (all by default), printing one line each."""
    results = []
    for i, fn in enumerate(ALL_CRITERIA, start=1):
        if ids is not None and i not in ids:
            continue
        res = fn()
        results.append(res)
        if verbose:
            print(res.line())
    return results
