"""Finite multigraph snapshots and monotonically growing sequences.

Vertices are opaque integer ids; multiplicities are nonnegative integers
stored sparsely by unordered pair, with (x, x) counting self-loops.  A
vertex's degree counts each incident edge once, self-loops included, and the
volume is the total degree.  Snapshots are immutable after construction and
safe to share across threads.
"""

import json
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import MonotonicityError, StructuralError


class GraphSnapshot:
    """One finite multigraph: vertex ids, pair multiplicities, cached degrees.

    Vertices of degree zero are dropped at construction (they can never carry
    walk mass); vertices whose only edges are self-loops are kept.
    """

    __slots__ = ("multiplicity", "degree", "volume", "vertex_ids", "index_of",
                 "coords", "_csr", "_lock")

    def __init__(self, edges, coords=None):
        """Build from an iterable of (x, y, mult); (x, x, m) adds m self-loops."""
        mult = {}
        for x, y, m in edges:
            if m < 0 or int(m) != m:
                raise StructuralError(f"multiplicity must be a nonnegative integer, got {m} on ({x},{y})")
            if m == 0:
                continue
            key = (x, y) if x <= y else (y, x)
            mult[key] = mult.get(key, 0) + int(m)
        degree = {}
        for (x, y), m in mult.items():
            degree[x] = degree.get(x, 0) + m
            if y != x:
                degree[y] = degree.get(y, 0) + m
        self.multiplicity = mult
        self.degree = degree
        self.volume = sum(degree.values())
        self.vertex_ids = tuple(sorted(degree))
        self.index_of = {v: i for i, v in enumerate(self.vertex_ids)}
        self.coords = coords
        self._csr = None
        self._lock = threading.Lock()

    @property
    def n_vertices(self):
        return len(self.vertex_ids)

    def pair_multiplicity(self, x, y):
        key = (x, y) if x <= y else (y, x)
        return self.multiplicity.get(key, 0)

    def neighbors(self, x):
        """Vertices y != x with pi(x, y) >= 1."""
        out = []
        for (a, b), _ in self.multiplicity.items():
            if a == x and b != x:
                out.append(b)
            elif b == x and a != x:
                out.append(a)
        return out

    def is_connected(self):
        """Connectivity of the non-isolated vertex set through non-loop edges."""
        if self.n_vertices <= 1:
            return True
        adj = {v: [] for v in self.vertex_ids}
        for (x, y) in self.multiplicity:
            if x != y:
                adj[x].append(y)
                adj[y].append(x)
        seen = {self.vertex_ids[0]}
        stack = [self.vertex_ids[0]]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_vertices

    def csr(self):
        """Row-stochastic kernel in CSR form: (indptr, indices, prob, cdf).

        Indices are snapshot-local (positions in vertex_ids).  Built lazily,
        cached, and safe under concurrent calls.
        """
        with self._lock:
            if self._csr is None:
                n = self.n_vertices
                rows = [[] for _ in range(n)]
                for (x, y), m in self.multiplicity.items():
                    ix, iy = self.index_of[x], self.index_of[y]
                    rows[ix].append((iy, m))
                    if iy != ix:
                        rows[iy].append((ix, m))
                indptr = np.zeros(n + 1, dtype=np.int64)
                idx = []
                pr = []
                for i, row in enumerate(rows):
                    row.sort()
                    d = self.degree[self.vertex_ids[i]]
                    for j, m in row:
                        idx.append(j)
                        pr.append(m / d)
                    indptr[i + 1] = len(idx)
                indices = np.asarray(idx, dtype=np.int64)
                prob = np.asarray(pr, dtype=np.float64)
                cdf = np.empty_like(prob)
                for i in range(n):
                    lo, hi = indptr[i], indptr[i + 1]
                    np.cumsum(prob[lo:hi], out=cdf[lo:hi])
                    cdf[hi - 1] = 1.0
                self._csr = (indptr, indices, prob, cdf)
            return self._csr

    def laziness_floor(self):
        """min over x of pi(x, x)/pi(x)."""
        return min(self.pair_multiplicity(x, x) / self.degree[x] for x in self.vertex_ids)

    def max_degree(self):
        return max(self.degree.values())

    def debug_json(self, t):
        edges = sorted([x, y, m] for (x, y), m in self.multiplicity.items())
        return json.dumps({"t": t, "edges": edges, "volume": self.volume})


class GrowingGraphSequence:
    """t -> GraphSnapshot with edge-wise monotone multiplicities.

    `builder(t)` produces the snapshot; results are memoized behind a lock so
    concurrent snapshot_at calls are safe and repeated queries share objects.
    Families may pass `snapshot_key` mapping t to a coarser cache key (e.g.
    the ball radius) so frozen stretches share a single snapshot.
    """

    def __init__(self, builder, horizon, gamma=None, delta_cap=None,
                 frozen_schedule=None, snapshot_key=None, meta=None):
        self._builder = builder
        self._key = snapshot_key or (lambda t: t)
        self._cache = {}
        self._lock = threading.Lock()
        self.horizon = horizon
        self.gamma = gamma
        self.delta_cap = delta_cap
        self.frozen_schedule = frozen_schedule
        self.meta = dict(meta or {})

    def snapshot_at(self, t):
        if t < 0:
            raise ValueError("t must be >= 0")
        key = self._key(t)
        with self._lock:
            snap = self._cache.get(key)
        if snap is None:
            snap = self._builder(t)
            with self._lock:
                snap = self._cache.setdefault(key, snap)
        return snap

    def volume_at(self, t):
        return self.snapshot_at(t).volume


@dataclass
class ValidationReport:
    ok: bool
    horizon: int
    first_violation: tuple | None = None
    structural_errors: list = field(default_factory=list)
    laziness_floor: float = float("nan")
    max_degree: int = 0
    declared_gamma: float | None = None

    def summary(self):
        status = "pass" if self.ok else f"violation at {self.first_violation}"
        return (f"{status}; laziness floor {self.laziness_floor:.6g}; "
                f"max degree {self.max_degree}")


def validate_monotone(seq, horizon):
    """Scan t in [0, horizon] for edge-wise monotonicity and report floors.

    Returns a ValidationReport with the first violating (t, x, y) if any,
    the realized laziness floor min_{t,x} pi(x,x)/pi(x), and the max degree.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    report = ValidationReport(ok=True, horizon=horizon, declared_gamma=seq.gamma)
    floor = float("inf")
    maxdeg = 0
    prev = None
    for t in range(horizon + 1):
        try:
            snap = seq.snapshot_at(t)
        except StructuralError as e:
            report.ok = False
            report.structural_errors.append((t, str(e)))
            return report
        floor = min(floor, snap.laziness_floor())
        maxdeg = max(maxdeg, snap.max_degree())
        if prev is not None and prev is not snap:
            for (x, y), m in prev.multiplicity.items():
                if snap.pair_multiplicity(x, y) < m:
                    report.ok = False
                    report.first_violation = (t, x, y)
                    report.laziness_floor = floor
                    report.max_degree = maxdeg
                    return report
        prev = snap
    report.laziness_floor = floor
    report.max_degree = maxdeg
    return report


def relative_boundary(H, reference):
    """Inner boundary of H relative to `reference`: members with an edge out.

    H must be a nonempty subset of the reference snapshot's vertices.
    """
    H = set(H)
    if not H:
        raise ValueError("H must be nonempty")
    verts = set(reference.vertex_ids)
    if not H <= verts:
        raise ValueError("H must be a subset of the reference vertex set")
    out = set()
    for (x, y) in reference.multiplicity:
        if x != y:
            if x in H and y not in H:
                out.add(x)
            elif y in H and x not in H:
                out.add(y)
    return out


def check_evolving_ratio(num, den, context=""):
    """Guard for ratios that monotonicity promises to keep in [0, 1]."""
    if num > den:
        raise MonotonicityError(
            f"ratio {num}/{den} exceeds 1{' in ' + context if context else ''}; "
            "the sequence is not edge-wise monotone")
