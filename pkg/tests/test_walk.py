import math
from fractions import Fraction

import numpy as np
import pytest

from growlab.errors import BudgetExceededError
from growlab.families import (
    growing_path_family,
    lattice_ball_family,
    lattice_ball_snapshot,
    two_vertex_frozen,
)
from growlab.graph import GraphSnapshot, GrowingGraphSequence, relative_boundary
from growlab.walk import (
    evolve_exact,
    evolve_exact_rational,
    hitting_law_mc,
    hitting_law_ratio,
    hitting_time_tail,
    hitting_times_mc,
    on_diag_lower_check,
    return_stats_exact,
    simulate,
    simulate_paths,
    step_kernel,
)


def frozen(snap, horizon=1000):
    return GrowingGraphSequence(lambda t: snap, horizon, snapshot_key=lambda t: 0)


def test_step_kernel_single_vertex():
    snap = GraphSnapshot([(0, 0, 2)])
    assert step_kernel(snap, 0) == {0: Fraction(1)}


def test_step_kernel_two_vertex():
    seq = two_vertex_frozen()
    row = step_kernel(seq.snapshot_at(0), 0)
    assert row == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_step_kernel_path_with_middle_loop():
    snap = GraphSnapshot([(0, 1, 1), (1, 2, 1), (1, 1, 1)])
    row = step_kernel(snap, 1)
    assert row == {0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)}


def test_evolve_point_mass_at_zero():
    seq = two_vertex_frozen()
    res = evolve_exact(seq, 0, 0)
    assert res.distributions[0].as_dict() == {0: 1.0}


def test_evolve_two_vertex_stationary():
    seq = two_vertex_frozen()
    res = evolve_exact(seq, 0, 2)
    assert res.distributions[1].as_dict() == {0: 0.5, 1: 0.5}
    assert res.distributions[2].as_dict() == {0: 0.5, 1: 0.5}
    assert not res.renormalizations


def test_evolve_rational_matches_float():
    seq = growing_path_family()
    res = evolve_exact(seq, 0, 8)
    rat = evolve_exact_rational(seq, 0, 8)
    for t in (3, 8):
        for y, pr in rat[t].items():
            assert abs(res.prob(t, y) - float(pr)) < 1e-14


def test_evolve_mass_conserved_long_run():
    seq = lattice_ball_family(2, 1.0, horizon=210)
    res = evolve_exact(seq, 0, 200, record_times=(200,))
    assert abs(res.distributions[200].mass() - 1.0) <= 1e-12
    assert not res.renormalizations


def test_evolve_state_cap():
    seq = lattice_ball_family(2, 1.0, horizon=210)
    with pytest.raises(BudgetExceededError):
        evolve_exact(seq, 0, 200, state_cap=50)


def test_reversibility_on_frozen_snapshot():
    snap = GraphSnapshot([(0, 1, 2), (1, 2, 1), (0, 0, 1), (2, 2, 2)])
    seq = frozen(snap)
    t = 6
    evs = {x: evolve_exact_rational(seq, x, t) for x in snap.vertex_ids}
    for x in snap.vertex_ids:
        for y in snap.vertex_ids:
            lhs = snap.degree[x] * evs[x][t].get(y, Fraction(0))
            rhs = snap.degree[y] * evs[y][t].get(x, Fraction(0))
            assert lhs == rhs


def test_simulate_t0_all_at_start():
    seq = two_vertex_frozen()
    paths = simulate_paths(seq, 0, 0, 50, seed=3)
    assert (paths == 0).all()


def test_simulate_binomial_margin():
    seq = two_vertex_frozen()
    res = simulate(seq, 0, 1, 10 ** 5, seed=4, record_times=(1,))
    _, marg = res.marginal(1)
    se = math.sqrt(0.25 / 10 ** 5)
    assert abs(marg[1] - 0.5) <= 3 * se


def test_simulate_matches_exact_on_lattice():
    seq = lattice_ball_family(2, 1.0, horizon=60)
    n = 2 * 10 ** 4
    res = simulate(seq, 0, 50, n, seed=5, record_times=(50,))
    snap, freq = res.marginal(50)
    exact = evolve_exact(seq, 0, 50, record_times=(50,)).distributions[50]
    for i, y in enumerate(snap.vertex_ids):
        p = exact.probs[i]
        if p >= 10 / n:
            se = math.sqrt(p * (1 - p) / n)
            assert abs(freq[i] - p) <= 3.5 * se, (y, freq[i], p)


def test_simulate_reproducible():
    seq = growing_path_family()
    a = simulate_paths(seq, 0, 10, 64, seed=9)
    b = simulate_paths(seq, 0, 10, 64, seed=9)
    assert (a == b).all()
    c = simulate_paths(seq, 0, 10, 64, seed=10)
    assert (a != c).any()


def test_simulated_transitions_have_positive_multiplicity():
    seq = growing_path_family()
    paths = simulate_paths(seq, 0, 12, 200, seed=6)
    for t in range(12):
        snap = seq.snapshot_at(t)
        for i in range(paths.shape[0]):
            assert snap.pair_multiplicity(paths[i, t], paths[i, t + 1]) >= 1


def test_return_stats_trivial_horizon():
    seq = two_vertex_frozen()
    rs = return_stats_exact(seq, 0, 0)
    assert rs.e_n0 == 1.0
    assert rs.pz_ratio == 1.0


def test_return_stats_two_vertex_exact():
    seq = two_vertex_frozen()
    rs = return_stats_exact(seq, 0, 2)
    assert abs(rs.e_n0 - 2.0) < 1e-14
    # N = 1 + I1 + I2 with independent fair indicators: E[N^2] = 4.5
    assert abs(rs.e_n0_sq - 4.5) < 1e-14
    assert abs(rs.pz_ratio - 8 / 9) < 1e-14


def test_hitting_time_zero_on_boundary():
    snap = lattice_ball_snapshot(2, 3, 4)
    H = set(snap.vertex_ids)
    boundary = {v for v in H if sum(abs(c) for c in snap.coords[v]) == 3}
    inner_H = {v for v in H if sum(abs(c) for c in snap.coords[v]) <= 2}
    x_on_boundary = next(iter(relative_boundary(inner_H, snap)))
    tau = hitting_times_mc(snap, inner_H, x_on_boundary, 100, seed=0, max_steps=10)
    assert (tau == 0).all()
    assert boundary  # shape sanity


def test_hitting_tail_z3_ball_decays():
    # walk lives on a slightly larger ball; H is the radius-8 sub-ball, so its
    # inner boundary is the radius-8 sphere
    snap = lattice_ball_snapshot(3, 9, 6)
    H = {v for v in snap.vertex_ids if sum(abs(c) for c in snap.coords[v]) <= 8}
    center = next(v for v in H if all(c == 0 for c in snap.coords[v]))
    rep = hitting_time_tail(snap, H, center, s_grid=(0.5, 1.0, 2.0, 4.0),
                            n_replicates=10 ** 4, seed=7)
    assert all(a >= b for a, b in zip(rep.tail, rep.tail[1:]))
    assert rep.tail[0] > rep.tail[-1]
    assert rep.fitted_rate > 0


def test_hitting_tail_requires_boundary():
    snap = lattice_ball_snapshot(2, 2, 4)
    with pytest.raises(ValueError):
        hitting_time_tail(snap, set(snap.vertex_ids), 0, (1.0,))
    with pytest.raises(ValueError):
        hitting_time_tail(snap, set(snap.vertex_ids) | {10 ** 9}, 0, (1.0,))


def test_hitting_tail_accepts_sequence():
    seq = lattice_ball_family(2, 1.0, horizon=30)
    snap = seq.snapshot_at(25)  # radius 5
    H = {v for v in snap.vertex_ids if sum(abs(c) for c in snap.coords[v]) <= 3}
    center = next(v for v in H if all(c == 0 for c in snap.coords[v]))
    rep = hitting_time_tail(seq, H, center, s_grid=(1.0, 2.0),
                            n_replicates=2000, seed=12, at_time=25)
    assert rep.tail[0] >= rep.tail[1]


def test_hitting_law_ratio_stable_between_scales():
    # two starts deep inside the region produce comparable exit laws
    ratios = []
    for r_out in (4, 6):
        snap = lattice_ball_snapshot(2, r_out + 1, 4)
        H = {v for v in snap.vertex_ids
             if sum(abs(c) for c in snap.coords[v]) <= r_out}
        by_coord = {snap.coords[v]: v for v in snap.vertex_ids}
        starts = [by_coord[(0, 0)], by_coord[(1, 0)]]
        laws = hitting_law_mc(snap, H, starts, 4000, seed=8, max_steps=5000)
        ratios.append(hitting_law_ratio(laws))
    assert all(1 <= r < 10 for r in ratios)


def test_on_diag_single_vertex_equality():
    snap = GraphSnapshot([(0, 0, 3)])
    rep = on_diag_lower_check(snap, 10)
    assert abs(rep.worst_margin) < 1e-15


def test_on_diag_k3_with_loops():
    snap = GraphSnapshot([(0, 1, 1), (1, 2, 1), (0, 2, 1),
                          (0, 0, 1), (1, 1, 1), (2, 2, 1)])
    rep = on_diag_lower_check(snap, 25)
    assert rep.worst_margin >= -1e-12


def test_on_diag_random_graphs_quick():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        edges = [(int(rng.integers(0, v)), v, 1) for v in range(1, n)]
        edges += [(i, i, int(rng.integers(0, 3))) for i in range(n)]
        snap = GraphSnapshot(edges)
        assert on_diag_lower_check(snap, 20).worst_margin >= -1e-12
