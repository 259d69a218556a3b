"""Isoperimetric profiles: exact by subset enumeration, analytic lower bounds.

A profile maps a weight budget r to the minimum boundary-to-weight ratio
pi(A, A^c)/pi(A) over nonempty sets with pi(A) <= min(v/2, r); with no
admissible set the value is an infinity sentinel.  Profiles also know how to
invert the decay integral used by the transition-probability bounds: the
largest l with  integral_{l/2}^{L/2} dz / (c+ z phi(z^{1/(alpha-1)})^2) >= 1,
solved in closed form piece by piece.
"""

import math

import numpy as np

from . import _core
from .errors import EnumerationCapError
from .families import lattice_ball_snapshot, loop_multiplicity

DEFAULT_ENUMERATION_CAP = 20

# Decay-inversion results are floored here when a profile is infinite on the
# whole admissible range (no set small enough exists, so the formal decay is
# infinite).
DECAY_FLOOR = 1e-300


class StepProfile:
    """Exact profile: right-continuous non-increasing step function.

    breakpoints is a list of (weight, phi) with strictly increasing integer
    weights and non-increasing phi values; phi(r) is the value at the largest
    breakpoint weight <= min(r, vhalf), and +inf below the first one.
    """

    source = "exact"

    def __init__(self, breakpoints, vhalf):
        self.breakpoints = list(breakpoints)
        self.vhalf = vhalf
        self._ws = [w for w, _ in self.breakpoints]
        self._fs = [f for _, f in self.breakpoints]

    @property
    def cheeger(self):
        return self._fs[-1] if self._fs else math.inf

    def phi(self, r):
        r = min(r, self.vhalf)
        i = np.searchsorted(self._ws, r, side="right") - 1
        return self._fs[i] if i >= 0 else math.inf

    def decay_invert(self, L_half, c_plus, alpha, budget=1.0):
        if not self._ws:
            return None
        one_m = 1.0 - alpha
        # z-space piece tops; piece i (value fs[i]) spans (z of w_{i+1}, z of w_i]
        z_of = lambda w: w ** (-one_m)
        z_top = z_of(self._ws[0])
        hi = min(L_half, z_top)  # above z_top phi is infinite: zero integrand
        if hi <= 0:
            return None
        for i, f in enumerate(self._fs):
            lo = z_of(self._ws[i + 1]) if i + 1 < len(self._ws) else 0.0
            if hi <= lo:
                continue
            if f == 0.0:
                return hi  # infinite integrand: no decay below this point
            cand = hi * math.exp(-budget * c_plus * f * f)
            if cand >= lo:
                return cand
            budget -= math.log(hi / lo) / (c_plus * f * f)
            hi = lo
        raise AssertionError("unreachable: last piece extends to z=0")


class PowerLawProfile:
    """Analytic lower bound phi(r) = c * (min(r, vhalf))^(-1/d)."""

    source = "analytic-lower-bound"

    def __init__(self, c, d, vhalf):
        self.c = c
        self.d = d
        self.vhalf = vhalf

    @property
    def cheeger(self):
        return self.c * self.vhalf ** (-1.0 / self.d)

    def phi(self, r):
        if r <= 0:
            return math.inf
        return self.c * min(r, self.vhalf) ** (-1.0 / self.d)

    def decay_invert(self, L_half, c_plus, alpha, budget=1.0):
        one_m = 1.0 - alpha
        kappa = 2.0 / (self.d * one_m)
        z_v = self.vhalf ** (-one_m)
        hi = L_half
        if hi > z_v:
            # power piece: integrand z^(-1-kappa) / (c+ c^2)
            denom = kappa * c_plus * self.c * self.c
            target = hi ** (-kappa) + budget * denom
            cand = target ** (-1.0 / kappa)
            if cand >= z_v:
                return cand
            budget -= (z_v ** (-kappa) - hi ** (-kappa)) / denom
            hi = z_v
        f = self.cheeger
        if f == 0.0:
            return hi
        return hi * math.exp(-budget * c_plus * f * f)


class ConstantProfile:
    """Flat certified floor phi = delta (expander-like families)."""

    source = "analytic-lower-bound"

    def __init__(self, delta, vhalf=None):
        self.delta = delta
        self.vhalf = vhalf

    @property
    def cheeger(self):
        return self.delta

    def phi(self, r):
        return self.delta

    def decay_invert(self, L_half, c_plus, alpha, budget=1.0):
        if self.delta == 0.0:
            return L_half
        return L_half * math.exp(-budget * c_plus * self.delta * self.delta)


def exact_profile(snapshot, cap=DEFAULT_ENUMERATION_CAP):
    """Exact profile by enumeration of all subsets with pi(A) <= v/2.

    Gray-code order with incremental cut and weight updates; vertex count is
    capped (default 20) since the scan is exponential.
    """
    n = snapshot.n_vertices
    if n > cap:
        raise EnumerationCapError(
            f"snapshot has {n} vertices, over the enumeration cap {cap}; "
            "use an analytic profile for large snapshots")
    half = snapshot.volume // 2
    deg = np.array([snapshot.degree[v] for v in snapshot.vertex_ids], dtype=np.int64)
    rows = [[] for _ in range(n)]
    for (x, y), m in snapshot.multiplicity.items():
        if x == y:
            continue
        ix, iy = snapshot.index_of[x], snapshot.index_of[y]
        rows[ix].append((iy, m))
        rows[iy].append((ix, m))
    indptr = np.zeros(n + 1, dtype=np.int64)
    idx, mult = [], []
    for i, row in enumerate(rows):
        for j, m in sorted(row):
            idx.append(j)
            mult.append(m)
        indptr[i + 1] = len(idx)
    minratio = _core.gray_subset_min_ratio(
        deg, indptr, np.asarray(idx, dtype=np.int64),
        np.asarray(mult, dtype=np.int64), half)
    breakpoints = []
    best = math.inf
    for w in range(1, half + 1):
        if minratio[w] < best:
            best = minratio[w]
            breakpoints.append((w, best))
    return StepProfile(breakpoints, half)


def cheeger_constant(snapshot, cap=DEFAULT_ENUMERATION_CAP):
    """Direct Cheeger-only enumeration (cross-check for exact_profile)."""
    return exact_profile(snapshot, cap=cap).cheeger


def analytic_profile(seq, t):
    """Certified lower-bound profile attached to a family, at time t.

    Lattice-ball families expose phi(r) >= c_d (r ^ v/2)^(-1/d); expander
    families a constant floor.  Raises for families without a certificate.
    """
    fam = seq.meta.get("family")
    vhalf = seq.snapshot_at(t).volume / 2.0
    if fam in ("lattice_ball", "frozen_nested"):
        c_d = seq.meta.get("c_d")
        if c_d is None:
            raise ValueError(f"no calibrated c_d for family {fam!r}")
        return PowerLawProfile(c_d, seq.meta["d"], vhalf)
    if fam == "expander":
        return ConstantProfile(seq.meta["cheeger_floor"], vhalf)
    raise ValueError(f"family {fam!r} carries no analytic profile certificate")


def profile_provider(seq, cap=DEFAULT_ENUMERATION_CAP):
    """u -> profile: exact when the snapshot is small enough, else analytic.

    Results are cached per distinct snapshot object, so frozen stretches of a
    sequence share one enumeration.
    """
    cache = {}

    def provider(u):
        snap = seq.snapshot_at(u)
        key = id(snap)
        if key not in cache:
            if snap.n_vertices <= cap:
                cache[key] = exact_profile(snap, cap=cap)
            else:
                cache[key] = analytic_profile(seq, u)
        return cache[key]

    return provider


def dominates(profile, lower_bound, rs=None, tol=1e-12):
    """Check profile.phi(r) >= lower_bound.phi(r) on breakpoints (or given rs)."""
    if rs is None:
        rs = [w for w, _ in profile.breakpoints] + [profile.vhalf]
    return all(profile.phi(r) >= lower_bound.phi(r) - tol for r in rs)


def calibrate_cd(d, max_radius=3, gamma=0.5, cap=26):
    """Largest c with exact ball profiles dominating c (r ^ v/2)^(-1/d).

    Scans lazy lattice balls of radius 1..max_radius, skipping radii whose
    vertex count is beyond the enumeration cap (radius 3 already has 63
    vertices in three dimensions); the binding constraint at each profile
    breakpoint w is c <= phi(w) w^(1/d).
    """
    from .families import l1_ball_count

    m = loop_multiplicity(gamma, 2 * d)
    best = math.inf
    for r in range(1, max_radius + 1):
        if l1_ball_count(d, r) > cap:
            break
        snap = lattice_ball_snapshot(d, r, m)
        prof = exact_profile(snap, cap=cap)
        for w, f in prof.breakpoints:
            best = min(best, f * w ** (1.0 / d))
    if not math.isfinite(best):
        raise EnumerationCapError(f"no calibratable radius for d={d} under cap {cap}")
    return best
