import json

import numpy as np
import pytest

from growlab.errors import StructuralError
from growlab.families import lattice_ball_family, two_vertex_frozen
from growlab.graph import GraphSnapshot, GrowingGraphSequence, relative_boundary, validate_monotone


def test_snapshot_degrees_and_volume():
    snap = GraphSnapshot([(0, 1, 2), (1, 2, 1), (1, 1, 3)])
    assert snap.degree == {0: 2, 1: 6, 2: 1}
    assert snap.volume == 9
    assert snap.pair_multiplicity(1, 0) == 2  # symmetric lookup
    assert snap.pair_multiplicity(1, 1) == 3


def test_snapshot_drops_degree_zero_but_keeps_loop_only_vertices():
    snap = GraphSnapshot([(0, 0, 2), (1, 2, 0)])
    assert snap.vertex_ids == (0,)
    assert snap.degree[0] == 2


def test_snapshot_rejects_bad_multiplicity():
    with pytest.raises(StructuralError):
        GraphSnapshot([(0, 1, -1)])
    with pytest.raises(StructuralError):
        GraphSnapshot([(0, 1, 1.5)])


def test_degree_recomputation_matches_cache():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        edges = [(int(rng.integers(0, n)), int(rng.integers(0, n)),
                  int(rng.integers(1, 4))) for _ in range(n * 2)]
        snap = GraphSnapshot(edges)
        for x in snap.vertex_ids:
            recomputed = sum(m for (a, b), m in snap.multiplicity.items()
                             if a == x or b == x)
            assert recomputed == snap.degree[x]
        assert snap.volume == sum(snap.degree.values())


def test_csr_rows_are_stochastic():
    snap = GraphSnapshot([(0, 1, 1), (1, 2, 2), (0, 0, 1)])
    indptr, indices, prob, cdf = snap.csr()
    for i in range(snap.n_vertices):
        row = prob[indptr[i]:indptr[i + 1]]
        assert abs(row.sum() - 1.0) < 1e-15
        assert cdf[indptr[i + 1] - 1] == 1.0


def test_validate_frozen_two_vertex():
    seq = two_vertex_frozen()
    rep = validate_monotone(seq, 10)
    assert rep.ok
    assert rep.laziness_floor == 0.5
    assert rep.max_degree == 2


def test_validate_detects_drop():
    good = GraphSnapshot([(0, 1, 2), (0, 0, 1), (1, 1, 1)])
    bad = GraphSnapshot([(0, 1, 1), (0, 0, 1), (1, 1, 1)])
    seq = GrowingGraphSequence(lambda t: bad if t >= 5 else good, 10)
    rep = validate_monotone(seq, 10)
    assert not rep.ok
    assert rep.first_violation == (5, 0, 1)


def test_validate_lattice_quarter_power():
    # r(t) = ceil(t^(1/4)) realized with beta/d = 1/4
    seq = lattice_ball_family(2, 0.5, horizon=100)
    rep = validate_monotone(seq, 100)
    assert rep.ok
    assert rep.laziness_floor == 0.5  # equality at max degree, gamma = 1/2


def test_validate_reports_structural_failure():
    from growlab.errors import StructuralError

    def builder(t):
        if t >= 3:
            raise StructuralError("bad multiplicities at this stage")
        return GraphSnapshot([(0, 1, 1)])

    seq = GrowingGraphSequence(builder, 10)
    rep = validate_monotone(seq, 10)
    assert not rep.ok
    assert rep.structural_errors and rep.structural_errors[0][0] == 3


def test_validate_is_repeatable():
    seq = lattice_ball_family(2, 0.5, horizon=30)
    r1 = validate_monotone(seq, 30)
    r2 = validate_monotone(seq, 30)
    assert (r1.ok, r1.laziness_floor, r1.max_degree) == \
           (r2.ok, r2.laziness_floor, r2.max_degree)


def test_relative_boundary_full_set_is_empty():
    snap = GraphSnapshot([(0, 1, 1), (1, 2, 1)])
    assert relative_boundary({0, 1, 2}, snap) == set()


def test_relative_boundary_singleton():
    snap = GraphSnapshot([(0, 1, 1), (1, 2, 1)])
    assert relative_boundary({1}, snap) == {1}


def test_relative_boundary_lattice_ball():
    seq = lattice_ball_family(2, 1.0, horizon=30)
    snap = seq.snapshot_at(25)  # radius 5 ball
    coords = snap.coords
    H = {v for v in snap.vertex_ids if sum(abs(c) for c in coords[v]) <= 2}
    expected = {v for v in H if sum(abs(c) for c in coords[v]) == 2}
    assert relative_boundary(H, snap) == expected


def test_relative_boundary_errors():
    snap = GraphSnapshot([(0, 1, 1)])
    with pytest.raises(ValueError):
        relative_boundary(set(), snap)
    with pytest.raises(ValueError):
        relative_boundary({0, 99}, snap)


def test_debug_json_schema():
    snap = GraphSnapshot([(0, 1, 2), (0, 0, 1)])
    blob = json.loads(snap.debug_json(7))
    assert blob == {"t": 7, "edges": [[0, 0, 1], [0, 1, 2]], "volume": 5}


def test_snapshot_connectivity_flag():
    assert GraphSnapshot([(0, 1, 1), (1, 2, 1)]).is_connected()
    assert not GraphSnapshot([(0, 1, 1), (2, 3, 1)]).is_connected()
    assert GraphSnapshot([(0, 0, 3)]).is_connected()


def test_sequence_memoizes_snapshots():
    seq = lattice_ball_family(2, 1.0, horizon=20)
    assert seq.snapshot_at(3) is seq.snapshot_at(4)  # same radius
    assert seq.snapshot_at(3) is not seq.snapshot_at(5)
