"""Concrete growing-graph generators and the merging-chain schedule.

Lattice families live on Z^d with graph distance = L1 distance; vertex ids
are assigned by rank in the (norm, coordinates) order, so growing a ball
appends ids and never relabels existing vertices.  Laziness is realized by a
uniform per-vertex self-loop multiplicity chosen so pi(x,x)/pi(x) >= gamma
with equality at maximum degree.
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetExceededError, StructuralError
from .graph import GraphSnapshot, GrowingGraphSequence

# Calibrated analytic-profile constants for lazy lattice balls (gamma = 1/2):
# largest c such that exact profiles on all enumerable balls of radius <= 3
# dominate c * (r ^ v/2)^(-1/d).  Recomputed by isoperimetry.calibrate_cd; the
# binding set is the corner singleton (one outgoing edge), present at every
# radius, which is why the small-radius calibration extrapolates safely.
DEFAULT_CD = {2: 0.447213595499958, 3: 0.2732758832531984}


def as_fraction(x):
    """Exact rational from int/str/Fraction, or the decimal literal of a float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def loop_multiplicity(gamma, max_nonloop_degree):
    """Smallest integer m with m/(m + D) >= gamma."""
    g = as_fraction(gamma)
    if not 0 < g <= Fraction(1, 2):
        raise ValueError("gamma must lie in (0, 1/2]")
    need = g * max_nonloop_degree / (1 - g)
    return max(1, math.ceil(need))


def ceil_tol(x, tol=1e-9):
    """Ceiling that forgives float noise just above an integer.

    pow(8, 1/3) = 2.0000000000000004 must give radius 2, not 3.
    """
    r = round(x)
    return r if abs(x - r) < tol else math.ceil(x)


# ---------------------------------------------------------------------------
# L1 lattice balls


@lru_cache(maxsize=None)
def l1_ball_count(d, r):
    """Number of points of Z^d with |x|_1 <= r."""
    if r < 0:
        return 0
    if d == 0:
        return 1
    return l1_ball_count(d - 1, r) + 2 * sum(l1_ball_count(d - 1, j) for j in range(r))


def l1_sphere_count(d, s):
    return l1_ball_count(d, s) - l1_ball_count(d, s - 1)


def l1_ball_edge_count(d, r):
    """Unordered nearest-neighbor pairs inside the ball (no loops)."""
    if r < 0:
        return 0
    return d * sum(l1_sphere_count(d - 1, s) * 2 * (r - s) for s in range(r + 1))


def l1_ball_volume(d, r, loop_mult):
    return loop_mult * l1_ball_count(d, r) + 2 * l1_ball_edge_count(d, r)


def l1_ball_points(d, r):
    """Points of the ball sorted by (norm, lexicographic); row i has id i."""
    axes = [np.arange(-r, r + 1)] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    norms = np.abs(grid).sum(axis=1)
    pts = grid[norms <= r]
    norms = np.abs(pts).sum(axis=1)
    order = np.lexsort(tuple(pts[:, i] for i in reversed(range(d))) + (norms,))
    return pts[order]


def lattice_ball_snapshot(d, r, loop_mult):
    """Induced subgraph of Z^d on B(0, r) plus loop_mult self-loops per vertex."""
    pts = l1_ball_points(d, r)
    id_of = {tuple(p): i for i, p in enumerate(pts)}
    edges = [(i, i, loop_mult) for i in range(len(pts))]
    for i, p in enumerate(pts):
        for ax in range(d):
            q = tuple(p[k] + (1 if k == ax else 0) for k in range(d))
            j = id_of.get(q)
            if j is not None:
                edges.append((i, j, 1))
    coords = {i: tuple(int(c) for c in p) for i, p in enumerate(pts)}
    return GraphSnapshot(edges, coords=coords)


def _check_state_budget(d, r, state_cap):
    n = l1_ball_count(d, r)
    if n > state_cap:
        raise BudgetExceededError(
            f"lattice ball of radius {r} in Z^{d} has {n} vertices, over the "
            f"state cap {state_cap}", budget=state_cap, requested=n)


def lattice_ball_family(d, beta, a=1.0, gamma=0.5, horizon=1000, *,
                        c_d=None, state_cap=500_000):
    """Growing induced lattice balls with radius r(t) = ceil(a t^(beta/d)).

    The volume then grows like t^beta up to constants.  Metadata carries the
    analytic isoperimetric lower-bound constant c_d (calibrated default).
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    m = loop_multiplicity(gamma, 2 * d)

    def radius(t):
        return 0 if t <= 0 else ceil_tol(a * t ** (beta / d))

    _check_state_budget(d, radius(horizon), state_cap)

    def build(t):
        return lattice_ball_snapshot(d, radius(t), m)

    meta = {
        "family": "lattice_ball", "d": d, "beta": beta, "a": a,
        "gamma": float(as_fraction(gamma)), "loop_mult": m,
        "c_d": DEFAULT_CD.get(d) if c_d is None else c_d,
        "radius": radius,
    }
    return GrowingGraphSequence(build, horizon, gamma=as_fraction(gamma),
                                delta_cap=2 * d + m, snapshot_key=radius, meta=meta)


def frozen_nested_family(d, radii, envelope_radii, stage_times, gamma=0.5, *,
                         delta=None, state_cap=500_000):
    """Stage-frozen nested lattice balls: G_t = B(0, r_l) on [t_l, t_{l+1}).

    radii[l] and envelope_radii[l] give the inner stage ball and its envelope;
    stage l+1 must clear the previous envelope by the declared relative gap.
    """
    L = len(radii)
    if not (len(envelope_radii) == L and len(stage_times) == L):
        raise ValueError("radii, envelope_radii, stage_times must have equal length")
    if stage_times[0] != 0:
        raise ValueError("stage_times must start at 0")
    for l in range(L):
        if envelope_radii[l] < radii[l]:
            raise StructuralError(f"envelope r'_{l} < r_{l}")
        if l + 1 < L and radii[l + 1] < envelope_radii[l]:
            raise StructuralError(
                f"nesting violation: K^{l} (radius {envelope_radii[l]}) is not "
                f"inside K_{l + 1} (radius {radii[l + 1]})")
    gaps = [radii[l + 1] / envelope_radii[l] - 1 for l in range(L - 1)]
    realized_delta = min(gaps) if gaps else None
    if delta is not None and realized_delta is not None and realized_delta < delta:
        raise StructuralError(
            f"declared delta {delta} not met: min gap {realized_delta:.4g}")
    m = loop_multiplicity(gamma, 2 * d)
    _check_state_budget(d, radii[-1], state_cap)

    def stage_of(t):
        return min(bisect_right(stage_times, t) - 1, L - 1)

    def build(t):
        return lattice_ball_snapshot(d, radii[stage_of(t)], m)

    stages = [{
        "l": l, "t_start": stage_times[l],
        "t_end": stage_times[l + 1] if l + 1 < L else None,
        "radius": radii[l], "envelope_radius": envelope_radii[l],
        "volume": l1_ball_volume(d, radii[l], m),
    } for l in range(L)]
    meta = {
        "family": "frozen_nested", "d": d, "gamma": float(as_fraction(gamma)),
        "loop_mult": m, "delta": realized_delta, "stages": stages,
        "c_d": DEFAULT_CD.get(d),
    }
    horizon = stage_times[-1]
    intervals = [(stage_times[l], stage_times[l + 1]) for l in range(L - 1)]
    return GrowingGraphSequence(build, horizon, gamma=as_fraction(gamma),
                                delta_cap=2 * d + m, frozen_schedule=intervals,
                                snapshot_key=stage_of, meta=meta)


def expander_family(n0=4, growth=1, horizon=100, gamma=0.5):
    """Growing complete graphs with laziness loops; Cheeger floor (1-gamma)/2.

    For any subset with pi(A) <= v/2 (so |A| <= n/2) the cut ratio is
    (n-|A|)/(n-1+m) >= (1-gamma)/2, certifying a uniform profile floor.
    """
    g = as_fraction(gamma)

    def size(t):
        return n0 + growth * t

    def build(t):
        n = size(t)
        m = loop_multiplicity(g, n - 1)
        edges = [(i, i, m) for i in range(n)]
        edges += [(i, j, 1) for i in range(n) for j in range(i + 1, n)]
        return GraphSnapshot(edges)

    n_max = size(horizon)
    meta = {
        "family": "expander", "n0": n0, "growth": growth,
        "gamma": float(g), "cheeger_floor": float((1 - g) / 2),
    }
    return GrowingGraphSequence(build, horizon, gamma=g,
                                delta_cap=n_max - 1 + loop_multiplicity(g, n_max - 1),
                                snapshot_key=size, meta=meta)


def path_snapshot(n, loops=0):
    """Path 0-1-...-(n-1) with unit edges and optional per-vertex loops."""
    edges = [(i, i + 1, 1) for i in range(n - 1)]
    if loops:
        edges += [(i, i, loops) for i in range(n)]
    return GraphSnapshot(edges)


def growing_path_family(sizes=(4, 6, 8), change_times=(0, 4, 8), loops=1, horizon=20):
    """Paths that lengthen at the given times, e.g. P_4 -> P_6 -> P_8."""
    if len(sizes) != len(change_times) or change_times[0] != 0:
        raise ValueError("need one size per change time, starting at t=0")

    def size(t):
        return sizes[min(bisect_right(change_times, t) - 1, len(sizes) - 1)]

    def build(t):
        return path_snapshot(size(t), loops=loops)

    meta = {"family": "growing_path", "sizes": sizes, "change_times": change_times}
    return GrowingGraphSequence(build, horizon, snapshot_key=size, meta=meta)


def two_vertex_frozen(horizon=1000):
    """Two vertices, one connecting edge, one self-loop each; frozen forever."""
    snap = GraphSnapshot([(0, 1, 1), (0, 0, 1), (1, 1, 1)])
    meta = {"family": "two_vertex"}
    return GrowingGraphSequence(lambda t: snap, horizon, gamma=Fraction(1, 2),
                                delta_cap=2, snapshot_key=lambda t: 0, meta=meta)


# ---------------------------------------------------------------------------
# Merging-chain schedule (time-periodic birth-death conductances)


@dataclass
class MergingChainSchedule:
    """2-periodic conductances on {0..N} whose kernels alternate weak drifts.

    Edge (x, x+1) carries weight 1+theta or 1-theta depending on the parity
    of t plus a key vertex (the right endpoint on the left half, the left
    endpoint on the right half); interior loops alternate 1-eta and 1, and the
    endpoints keep loop weight 2.  All conductances are exact rationals.
    """

    N: int
    theta: Fraction
    eta: Fraction

    def __post_init__(self):
        if self.N % 2 or self.N < 2:
            raise ValueError("N must be even and >= 2")
        if not (0 <= self.theta < 1 and 0 <= self.eta < 1):
            raise ValueError("theta, eta must lie in [0, 1)")

    def edge_weight(self, t, x):
        """Conductance of edge (x, x+1) at time t, x in [0, N-1]."""
        key = x + 1 if x + 1 <= self.N // 2 else x
        return 1 + self.theta if (key + t) % 2 == 0 else 1 - self.theta

    def loop_weight(self, t, x):
        if x == 0 or x == self.N:
            return Fraction(2)
        return 1 - self.eta if (x + t) % 2 == 0 else Fraction(1)

    def degree(self, t, x):
        w = self.loop_weight(t, x)
        if x > 0:
            w += self.edge_weight(t, x - 1)
        if x < self.N:
            w += self.edge_weight(t, x)
        return w

    def kernel_entry(self, t, x, y):
        """K^(t)(x, y) as an exact rational."""
        if abs(x - y) > 1:
            return Fraction(0)
        if y == x:
            num = self.loop_weight(t, x)
        elif y == x + 1:
            num = self.edge_weight(t, x)
        else:
            num = self.edge_weight(t, x - 1)
        return num / self.degree(t, x)

    def mu(self, t):
        """Reversible probability measure of K^(t), exact."""
        degs = [self.degree(t, x) for x in range(self.N + 1)]
        tot = sum(degs)
        return [d / tot for d in degs]

    def kernel_arrays(self, parity):
        """(lo, di, up) float64 rows for K^(t) with t of the given parity."""
        n = self.N + 1
        lo = np.zeros(n)
        di = np.zeros(n)
        up = np.zeros(n)
        for x in range(n):
            deg = self.degree(parity, x)
            if x > 0:
                lo[x] = float(self.edge_weight(parity, x - 1) / deg)
            if x < self.N:
                up[x] = float(self.edge_weight(parity, x) / deg)
            di[x] = float(self.loop_weight(parity, x) / deg)
        return lo, di, up

    def eps_certificate(self):
        """Smallest envelope eps over one period, per constraint family.

        Families: interior kernel entries vs 1/3, endpoint holds vs 2/3,
        scaled reversible measure vs 1, and exact detailed balance.
        """
        third, two_third = Fraction(1, 3), Fraction(2, 3)
        interior = Fraction(0)
        endpoint = Fraction(0)
        measure = Fraction(0)
        balanced = True
        for t in (0, 1):
            mu = self.mu(t)
            for x in range(self.N + 1):
                measure = max(measure, abs((self.N + 1) * mu[x] - 1))
                for y in (x - 1, x, x + 1):
                    if not 0 <= y <= self.N:
                        continue
                    k = self.kernel_entry(t, x, y)
                    if (x, y) in ((0, 0), (self.N, self.N)):
                        endpoint = max(endpoint, abs(k - two_third))
                    else:
                        interior = max(interior, abs(k - third))
                    if mu[x] * k != mu[y] * self.kernel_entry(t, y, x):
                        balanced = False
        return {
            "interior_kernel_dev": interior,
            "endpoint_kernel_dev": endpoint,
            "measure_dev": measure,
            "detailed_balance_exact": balanced,
            "eps": max(interior, endpoint, measure),
        }


def merging_schedule(N, theta, eta):
    """Time-periodic conductance assignment for the merging counterexample."""
    return MergingChainSchedule(N, as_fraction(theta), as_fraction(eta))
