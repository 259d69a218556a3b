import math

import numpy as np
import pytest

from growlab.errors import EnumerationCapError
from growlab.families import (
    DEFAULT_CD,
    expander_family,
    lattice_ball_family,
    lattice_ball_snapshot,
    path_snapshot,
)
from growlab.graph import GraphSnapshot
from growlab.isoperimetry import (
    ConstantProfile,
    PowerLawProfile,
    StepProfile,
    analytic_profile,
    calibrate_cd,
    cheeger_constant,
    dominates,
    exact_profile,
    profile_provider,
)


def test_disconnected_graph_has_zero_cheeger():
    snap = GraphSnapshot([(0, 1, 1), (2, 3, 1)])
    assert exact_profile(snap).cheeger == 0.0


def test_path4_profile():
    prof = exact_profile(path_snapshot(4))
    assert abs(prof.cheeger - 1 / 3) < 1e-15
    assert prof.phi(1) == 1.0          # only degree-1 singletons are admissible
    assert prof.phi(0.5) == math.inf   # below the smallest achievable weight
    assert prof.phi(10 ** 9) == prof.cheeger


def test_profile_non_increasing():
    prof = exact_profile(lattice_ball_snapshot(2, 2, 4))
    vals = [prof.phi(r) for r in range(1, prof.vhalf + 1)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_cheeger_matches_direct_enumeration():
    rng = np.random.default_rng(31)
    for _ in range(15):
        n = int(rng.integers(2, 8))
        edges = [(int(rng.integers(0, v)), v, int(rng.integers(1, 3)))
                 for v in range(1, n)]
        edges += [(i, i, int(rng.integers(0, 3))) for i in range(n)]
        snap = GraphSnapshot(edges)
        half = snap.volume // 2
        best = math.inf
        ids = snap.vertex_ids
        for mask in range(1, 1 << snap.n_vertices):
            A = {ids[i] for i in range(snap.n_vertices) if mask >> i & 1}
            w = sum(snap.degree[v] for v in A)
            if 0 < w <= half:
                cut = sum(m for (x, y), m in snap.multiplicity.items()
                          if x != y and (x in A) != (y in A))
                best = min(best, cut / w)
        assert cheeger_constant(snap) == best


def test_profile_invariant_under_relabeling():
    edges = [(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 0, 2), (3, 3, 1)]
    snap = GraphSnapshot(edges)
    relabel = {0: 40, 1: 7, 2: 23, 3: 11}
    snap2 = GraphSnapshot([(relabel[a], relabel[b], m) for a, b, m in edges])
    p1, p2 = exact_profile(snap), exact_profile(snap2)
    assert p1.breakpoints == p2.breakpoints
    assert p1.cheeger == p2.cheeger


def test_single_vertex_profile_is_infinite():
    prof = exact_profile(GraphSnapshot([(0, 0, 3)]))
    assert prof.breakpoints == []
    assert prof.cheeger == math.inf
    assert prof.phi(100) == math.inf


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError):
        exact_profile(lattice_ball_snapshot(2, 3, 4), cap=20)


def test_analytic_power_law_value():
    prof = PowerLawProfile(0.1, 3, 500.0)
    assert abs(prof.phi(8) - 0.05) < 1e-15


def test_expander_profile_constant():
    seq = expander_family(n0=5, growth=1, horizon=10, gamma=0.5)
    prof = analytic_profile(seq, 3)
    assert prof.phi(1) == prof.phi(10 ** 6) == 0.25
    assert prof.cheeger == 0.25


def test_exact_dominates_analytic_on_small_balls():
    seq = lattice_ball_family(2, 1.0, horizon=10)
    for t in (1, 4):  # radii 1 and 2
        snap = seq.snapshot_at(t)
        assert dominates(exact_profile(snap), analytic_profile(seq, t))


def test_exact_dominates_analytic_at_calibration_edge():
    # radius 3 (25 vertices) sits at the calibration boundary; domination must
    # hold there too since the binding corner-singleton constraint recurs
    seq = lattice_ball_family(2, 1.0, horizon=10)
    snap = seq.snapshot_at(9)
    assert snap.n_vertices == 25
    assert dominates(exact_profile(snap, cap=26), analytic_profile(seq, 9))


def test_shipped_cd_matches_calibration():
    assert abs(calibrate_cd(2) - DEFAULT_CD[2]) < 1e-12
    assert abs(calibrate_cd(3) - DEFAULT_CD[3]) < 1e-12


def test_profile_provider_switches_to_analytic():
    seq = lattice_ball_family(2, 1.0, horizon=30)
    prov = profile_provider(seq, cap=20)
    assert isinstance(prov(4), StepProfile)       # 13 vertices
    assert isinstance(prov(9), PowerLawProfile)   # 25 vertices


def _numeric_decay_integral(prof, l_half, L_half, c_plus, alpha, n=400_000):
    zs = np.linspace(l_half, L_half, n + 1)[1:]
    dz = (L_half - l_half) / n
    vals = []
    for z in zs:
        f = prof.phi(z ** (1.0 / (alpha - 1.0)))
        vals.append(0.0 if math.isinf(f) else 1.0 / (c_plus * z * f * f))
    return float(np.sum(vals) * dz)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_decay_inversion_against_quadrature(alpha):
    # closed-form piecewise inversion agrees with brute-force integration
    prof = exact_profile(lattice_ball_snapshot(2, 2, 4))
    c_plus = 0.4
    L_half = 0.5 * 5 ** (alpha - 1)
    l_half = prof.decay_invert(L_half, c_plus, alpha)
    assert 0 < l_half < L_half
    val = _numeric_decay_integral(prof, l_half, L_half, c_plus, alpha)
    assert abs(val - 1.0) < 5e-3


@pytest.mark.parametrize("alpha", [0.4, 0.6])
def test_power_law_inversion_against_quadrature(alpha):
    prof = PowerLawProfile(0.3, 2, 40.0)
    c_plus = 0.25
    L_half = 0.45
    l_half = prof.decay_invert(L_half, c_plus, alpha)
    assert 0 < l_half < L_half
    val = _numeric_decay_integral(prof, l_half, L_half, c_plus, alpha)
    assert abs(val - 1.0) < 5e-3


def test_single_vertex_decay_is_unbounded():
    prof = exact_profile(GraphSnapshot([(0, 0, 3)]))
    assert prof.decay_invert(0.4, 0.5, 0.5) is None


def test_zero_cheeger_profile_gives_no_decay():
    prof = ConstantProfile(0.0)
    assert prof.decay_invert(0.4, 0.5, 0.5) == 0.4
