"""Inhomogeneous birth-death merging experiments.

Two exact distribution vectors started from the endpoints evolve through the
2-periodic kernels; total-variation and relative-sup discrepancies are
tracked every step with first-crossing detection, so merging times up to
millions of steps cost O(t_max * N) without materializing any matrix product.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _core
from .errors import BudgetExceededError
from .families import MergingChainSchedule, as_fraction, merging_schedule
from .walk import _chunk_rng

RATIONAL_STEP_CAP = 2000


@dataclass
class TwoStateAnalysis:
    """Closed-form analysis of the auxiliary phase chain."""

    theta: Fraction
    eta: Fraction
    matrix: tuple
    stationary: tuple
    drift_a: Fraction
    drift_b: Fraction
    beta: Fraction
    stationary_exact: bool


def two_state_analysis(theta, eta):
    """Stationary law, per-phase drifts, and mean drift, in exact rationals.

    Phase A persists under moves and flips on lazy steps with probability
    (1-eta)/(3-eta); phase B flips with probability 1/3.
    """
    th, et = as_fraction(theta), as_fraction(eta)
    m = ((Fraction(2) / (3 - et), (1 - et) / (3 - et)),
         (Fraction(1, 3), Fraction(2, 3)))
    u = ((3 - et) / (6 - 4 * et), (3 - 3 * et) / (6 - 4 * et))
    fixed = (u[0] * m[0][0] + u[1] * m[1][0] == u[0]
             and u[0] * m[0][1] + u[1] * m[1][1] == u[1]
             and u[0] + u[1] == 1)
    drift_a = -2 * th / (3 - et)
    drift_b = 2 * th / 3
    beta = u[0] * drift_a + u[1] * drift_b
    return TwoStateAnalysis(theta=th, eta=et, matrix=m, stationary=u,
                            drift_a=drift_a, drift_b=drift_b, beta=beta,
                            stationary_exact=fixed)


@dataclass
class MergingReport:
    N: int
    theta: float
    eta: float
    delta: float
    t_max: int
    steps_done: int
    record_times: list
    tv: list
    relsup: list
    t_tv: int | None
    t_sup: int | None
    budget_exhausted: bool
    final_tv: float
    final_relsup: float
    max_mass_drift: float
    certificate: dict = field(default_factory=dict)


def merging_distances(N, theta, eta, t_max, *, delta=0.5, record_cap=100_000,
                      stop_when_crossed=False):
    """Exact two-start evolution with per-step distance tracking.

    Distances are checked every step (crossing times are exact); the recorded
    trace is strided so at most record_cap points are kept.  Crossings not
    reached within t_max leave the corresponding time None and set
    budget_exhausted.
    """
    sched = merging_schedule(N, theta, eta)
    lo0, di0, up0 = sched.kernel_arrays(0)
    lo1, di1, up1 = sched.kernel_arrays(1)
    p = np.zeros(N + 1)
    q = np.zeros(N + 1)
    p[0] = 1.0
    q[N] = 1.0
    stride = max(1, math.ceil(t_max / record_cap))
    n_buf = t_max // stride + 1
    tv_buf = np.empty(n_buf)
    sup_buf = np.empty(n_buf)
    done, n_rec, cross_tv, cross_sup, tv_fin, sup_fin = _core.pair_tridiag_scan(
        lo0, di0, up0, lo1, di1, up1, p, q, 0, t_max, delta, delta, stride,
        tv_buf, sup_buf, 1 if stop_when_crossed else 0)
    drift = max(abs(p.sum() - 1.0), abs(q.sum() - 1.0))
    times = [stride * (i + 1) for i in range(n_rec)]
    return MergingReport(
        N=N, theta=float(theta), eta=float(eta), delta=delta, t_max=t_max,
        steps_done=int(done), record_times=times,
        tv=[float(v) for v in tv_buf[:n_rec]],
        relsup=[float(v) for v in sup_buf[:n_rec]],
        t_tv=int(cross_tv) if cross_tv >= 0 else None,
        t_sup=int(cross_sup) if cross_sup >= 0 else None,
        budget_exhausted=cross_tv < 0 or cross_sup < 0,
        final_tv=float(tv_fin), final_relsup=float(sup_fin),
        max_mass_drift=float(drift), certificate=certify_constraints(N, theta, eta))


def tv_at(N, theta, eta, t):
    """Exact TV between the two endpoint evolutions at one horizon."""
    rep = merging_distances(N, theta, eta, t, delta=-1.0, record_cap=1)
    return rep.final_tv


def merging_time_tv(N, theta, eta, *, delta=0.5, t_max=10 ** 7):
    """First t with TV below delta, scanned exactly; None if not reached."""
    rep = merging_distances(N, theta, eta, t_max, delta=delta, record_cap=1,
                            stop_when_crossed=True)
    return rep.t_tv


def certify_constraints(N, theta, eta):
    """Envelope certificate over one period, exact in rationals.

    Returns the smallest eps containing the interior kernel entries around
    1/3, the endpoint holds around 2/3, and the scaled reversible measure
    around 1, plus an exact detailed-balance confirmation.
    """
    cert = merging_schedule(N, theta, eta).eps_certificate()
    return {
        "eps": float(cert["eps"]),
        "eps_exact": cert["eps"],
        "interior_kernel_dev": float(cert["interior_kernel_dev"]),
        "endpoint_kernel_dev": float(cert["endpoint_kernel_dev"]),
        "measure_dev": float(cert["measure_dev"]),
        "detailed_balance_exact": cert["detailed_balance_exact"],
    }


def evolve_pair_rational(sched: MergingChainSchedule, t_max):
    """Exact rational two-start evolution (small N, short horizons).

    Yields (t, p, q) with p, q lists of Fractions; denominators grow with t,
    so the horizon is capped.
    """
    if t_max > RATIONAL_STEP_CAP:
        raise BudgetExceededError(
            f"rational merging evolution capped at {RATIONAL_STEP_CAP} steps",
            budget=RATIONAL_STEP_CAP, requested=t_max)
    n = sched.N + 1
    p = [Fraction(0)] * n
    q = [Fraction(0)] * n
    p[0] = Fraction(1)
    q[sched.N] = Fraction(1)
    yield 0, list(p), list(q)
    for t in range(t_max):
        rows = [[(y, sched.kernel_entry(t, x, y)) for y in (x - 1, x, x + 1)
                 if 0 <= y <= sched.N] for x in range(n)]
        np_, nq = [Fraction(0)] * n, [Fraction(0)] * n
        for x in range(n):
            for y, k in rows[x]:
                np_[y] += p[x] * k
                nq[y] += q[x] * k
        p, q = np_, nq
        assert sum(p) == 1 and sum(q) == 1
        yield t + 1, list(p), list(q)


def tv_rational(p, q):
    return sum(abs(a - b) for a, b in zip(p, q)) / 2


# ---------------------------------------------------------------------------
# Excursion tails


@dataclass
class ExcursionTailReport:
    theta: float
    eta: float
    n_grid: list
    estimates: list
    std_errs: list
    slope: float
    intercept: float
    r_squared: float


def excursion_tail(n_grid, theta, eta, n_replicates=10 ** 5, seed=0):
    """MC tail of the first return time to 0: P(sigma_0 >= N/2) per N.

    Walkers start at vertex 0 at time 0 and survive while they avoid 0 at
    times 1..N/2-1.  Fits log-probability linearly in N and reports the
    slope with its R^2.
    """
    ests, ses = [], []
    for gi, N in enumerate(n_grid):
        sched = merging_schedule(N, theta, eta)
        samplers = [_tridiag_sampler(*sched.kernel_arrays(par)) for par in (0, 1)]
        rng = _chunk_rng(seed, gi)
        pos = np.zeros(n_replicates, dtype=np.int64)
        alive = np.ones(n_replicates, dtype=bool)
        for s in range(1, N // 2):
            u = rng.random(n_replicates)
            pos = samplers[(s - 1) % 2].step(pos, u)
            alive &= pos != 0
        p = float(alive.mean())
        ests.append(p)
        ses.append(math.sqrt(p * (1 - p) / n_replicates))
    xs = np.array([float(N) for N in n_grid])
    ys = np.array([math.log(p) if p > 0 else -math.inf for p in ests])
    ok = np.isfinite(ys)
    slope = intercept = r2 = math.nan
    if ok.sum() >= 2:
        slope, intercept = np.polyfit(xs[ok], ys[ok], 1)
        pred = slope * xs[ok] + intercept
        ss_res = float(((ys[ok] - pred) ** 2).sum())
        ss_tot = float(((ys[ok] - ys[ok].mean()) ** 2).sum())
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ExcursionTailReport(theta=float(theta), eta=float(eta),
                               n_grid=list(n_grid), estimates=ests, std_errs=ses,
                               slope=float(slope), intercept=float(intercept),
                               r_squared=float(r2))


def _tridiag_sampler(lo, di, up):
    n = lo.shape[0]
    indptr = np.zeros(n + 1, dtype=np.int64)
    idx, cdf = [], []
    for x in range(n):
        row = [(x - 1, lo[x]), (x, di[x]), (x + 1, up[x])]
        row = [(y, w) for y, w in row if 0 <= y < n and w > 0]
        acc = 0.0
        for y, w in row:
            acc += w
            idx.append(y)
            cdf.append(acc)
        cdf[-1] = 1.0
        indptr[x + 1] = len(idx)
    return _core.StepSampler(indptr, np.asarray(idx, dtype=np.int64),
                             np.asarray(cdf, dtype=np.float64))
