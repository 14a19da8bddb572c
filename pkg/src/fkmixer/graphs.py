"""Degree sequences, configuration-model multigraphs and local structure checks."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, NotGraphicalError, RetryExhaustedError
from .rng import as_generator


# ---------------------------------------------------------------------------
# degree sequences


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple

    def __init__(self, degrees: Iterable[int]):
        d = tuple(int(x) for x in degrees)
        if len(d) < 1:
            raise InvalidInputError("a degree sequence needs at least one vertex")
        if any(x < 0 for x in d):
            raise InvalidInputError("degrees must be non-negative")
        object.__setattr__(self, "degrees", d)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        """Sum of degrees (number of half-edges)."""
        return sum(self.degrees)

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    def is_even(self) -> bool:
        return self.total % 2 == 0

    def as_array(self) -> np.ndarray:
        return np.asarray(self.degrees, dtype=np.int64)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.degrees)


@dataclass(frozen=True)
class OffspringDistribution:
    """Law of ``d_v - 1`` when v is picked proportionally to its degree."""

    support: tuple
    probabilities: tuple

    def mean(self) -> float:
        return self.moment(1)

    def moment(self, k: float) -> float:
        return float(sum(p * x**k for x, p in zip(self.support, self.probabilities)))

    def pmf(self, x: int) -> float:
        for s, p in zip(self.support, self.probabilities):
            if s == x:
                return p
        return 0.0


def effective_offspring(dn: DegreeSequence | Sequence[int]) -> OffspringDistribution:
    dn = _as_dn(dn)
    total = dn.total
    if total <= 0:
        raise InvalidInputError("effective offspring law needs a positive degree sum")
    mass: dict[int, int] = {}
    for d in dn.degrees:
        if d > 0:
            mass[d - 1] = mass.get(d - 1, 0) + d
    support = tuple(sorted(mass))
    probs = tuple(mass[x] / total for x in support)
    return OffspringDistribution(support, probs)


def truncated_sequence(dn: DegreeSequence | Sequence[int]) -> DegreeSequence:
    """Drop the ceil(2 sqrt n) smallest degrees."""
    dn = _as_dn(dn)
    drop = math.ceil(2 * math.sqrt(dn.n))
    if dn.n < 4 or drop >= dn.n:
        raise InvalidInputError(f"n={dn.n} too small to drop {drop} entries")
    return DegreeSequence(sorted(dn.degrees)[drop:])


def is_graphical(dn: DegreeSequence | Sequence[int]) -> bool:
    """Erdos-Gallai test."""
    d = sorted(_as_dn(dn).degrees, reverse=True)
    if sum(d) % 2:
        return False
    n = len(d)
    prefix = 0
    for k in range(1, n + 1):
        prefix += d[k - 1]
        rhs = k * (k - 1) + sum(min(x, k) for x in d[k:])
        if prefix > rhs:
            return False
    return True


def _as_dn(dn) -> DegreeSequence:
    return dn if isinstance(dn, DegreeSequence) else DegreeSequence(dn)


# ---------------------------------------------------------------------------
# multigraphs


class MultiGraph:
    """Undirected multigraph on vertices ``0..n-1`` with an indexed edge list.

    Self-loops and parallel edges are allowed.  A self-loop at v appears twice in
    v's incidence list, so it contributes 2 to the degree.
    """

    __slots__ = ("n", "edges", "indptr", "nbr", "inc")

    def __init__(self, n: int, edges=()):
        n = int(n)
        if n < 0:
            raise InvalidInputError("vertex count must be non-negative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise InvalidInputError("edge endpoint out of range")
        e.setflags(write=False)
        self.n = n
        self.edges = e
        m = len(e)
        ends = np.concatenate([e[:, 0], e[:, 1]])
        others = np.concatenate([e[:, 1], e[:, 0]])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.argsort(ends, kind="stable")
        counts = np.bincount(ends, minlength=n) if m else np.zeros(n, dtype=np.int64)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.nbr = others[order].astype(np.int64)
        self.inc = eids[order].astype(np.int64)
        for a in (self.indptr, self.nbr, self.inc):
            a.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbr[self.indptr[v]:self.indptr[v + 1]]

    def incident(self, v: int) -> np.ndarray:
        """Edge ids at v (a self-loop is listed twice)."""
        return self.inc[self.indptr[v]:self.indptr[v + 1]]

    def endpoints(self, e: int) -> tuple[int, int]:
        u, v = self.edges[e]
        return int(u), int(v)

    def is_simple(self) -> bool:
        if self.m == 0:
            return True
        e = self.edges
        if np.any(e[:, 0] == e[:, 1]):
            return False
        key = np.sort(e, axis=1)
        return len(np.unique(key, axis=0)) == len(key)

    def adjacency_lists(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return (isinstance(other, MultiGraph) and self.n == other.n
                and np.array_equal(self.edges, other.edges))

    __hash__ = None

    # -- edge-list files: header ``n m`` then ``u v`` per line, 0-based

    def write_edgelist(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"{self.n} {self.m}\n")
            for u, v in self.edges.tolist():
                fh.write(f"{u} {v}\n")

    @classmethod
    def read_edgelist(cls, path) -> "MultiGraph":
        with open(path) as fh:
            lines = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise InvalidInputError("empty edge-list file")
        n, m = int(lines[0][0]), int(lines[0][1])
        edges = [(int(a), int(b)) for a, b in lines[1:]]
        if len(edges) != m:
            raise InvalidInputError(f"header says {m} edges, file has {len(edges)}")
        return cls(n, edges)


def read_degree_sequence(path) -> DegreeSequence:
    with open(path) as fh:
        return DegreeSequence(int(ln) for ln in fh if ln.strip())


def write_degree_sequence(dn: DegreeSequence, path) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{d}\n" for d in dn.degrees)


# small named graphs used throughout tests and examples

def path_graph(n: int) -> MultiGraph:
    return MultiGraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> MultiGraph:
    return MultiGraph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(k: int) -> MultiGraph:
    """K_{1,k} with center 0."""
    return MultiGraph(k + 1, [(0, i) for i in range(1, k + 1)])


def complete_graph(n: int) -> MultiGraph:
    return MultiGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


# ---------------------------------------------------------------------------
# generators


def _pair_half_edges(degrees: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    half = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    half = half[rng.permutation(len(half))]
    return half.reshape(-1, 2)


def sample_configuration_model(dn: DegreeSequence | Sequence[int], seed) -> MultiGraph:
    """Uniform perfect matching of the half-edges of ``dn``."""
    dn = _as_dn(dn)
    if not dn.is_even():
        raise InvalidInputError("degree sum must be even")
    rng = as_generator(seed, "configuration-model")
    return MultiGraph(dn.n, _pair_half_edges(dn.as_array(), rng))


def sample_simple_graph(dn: DegreeSequence | Sequence[int], seed, max_attempts: int = 1000) -> MultiGraph:
    """Configuration model conditioned on simplicity, by rejection."""
    dn = _as_dn(dn)
    if not is_graphical(dn):
        raise NotGraphicalError(f"degree sequence is not graphical: {dn.degrees}")
    rng = as_generator(seed, "simple-graph")
    d = dn.as_array()
    for _ in range(max_attempts):
        g = MultiGraph(dn.n, _pair_half_edges(d, rng))
        if g.is_simple():
            return g
    raise RetryExhaustedError(f"no simple graph after {max_attempts} attempts")


def sample_poisson_degrees(n: int, lam: float, rng: np.random.Generator) -> np.ndarray:
    d = rng.poisson(lam, size=n).astype(np.int64)
    while d.sum() % 2:
        i = rng.integers(n)
        d[i] = rng.poisson(lam)
    return d


def sample_er_poisson_cloning(n: int, lam: float, seed) -> MultiGraph:
    """Erdos-Renyi G(n, lam/n) surrogate: i.i.d. Poisson(lam) degrees + configuration model.

    An odd degree sum is repaired by redrawing one uniformly chosen coordinate
    until the sum is even.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    rng = as_generator(seed, "poisson-cloning")
    d = sample_poisson_degrees(n, lam, rng)
    return MultiGraph(n, _pair_half_edges(d, rng))


def planted_degree_sequence(n: int, base: int, planted: int) -> DegreeSequence:
    """``n-1`` vertices of degree ``base`` and vertex 0 of degree ``planted``."""
    return DegreeSequence([planted] + [base] * (n - 1))


def reveal_ball(dn: DegreeSequence | Sequence[int], v: int, R: int, seed) -> MultiGraph:
    """Breadth-first revealing of the ball B_R(v) of a configuration-model graph.

    Half-edges are matched one at a time, each exposed half-edge within distance
    ``R - 1`` of v being paired with a uniformly random unmatched half-edge; only
    the matched pairs needed to determine B_R(v) are drawn.  Returns the induced
    ball subgraph, labelled by original vertex ids (other vertices isolated).
    """
    dn = _as_dn(dn)
    if not dn.is_even():
        raise InvalidInputError("degree sum must be even")
    rng = as_generator(seed, "reveal-ball")
    owner = np.repeat(np.arange(dn.n), dn.as_array()).tolist()
    unmatched = list(range(len(owner)))
    pos = {h: i for i, h in enumerate(unmatched)}

    def take(h):
        i = pos.pop(h)
        last = unmatched.pop()
        if last != h:
            unmatched[i] = last
            pos[last] = i

    first_half = {}
    for h, w in enumerate(owner):
        first_half.setdefault(w, []).append(h)
    dist = {v: 0}
    queue = deque([v])
    edges = []
    while queue:
        x = queue.popleft()
        for h in first_half.get(x, []):
            if h not in pos:
                continue
            if dist[x] >= R:
                # half-edges of boundary vertices are revealed only if they lead
                # back inside the ball; that is settled when inner vertices match
                continue
            take(h)
            other = unmatched[rng.integers(len(unmatched))]
            take(other)
            y = owner[other]
            edges.append((x, y))
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    # Edges between two boundary vertices are part of E(B_R(v)); reveal the
    # remaining half-edges of boundary vertices to settle them.
    boundary = [w for w, dw in dist.items() if dw == R]
    for x in boundary:
        for h in first_half.get(x, []):
            if h not in pos:
                continue
            take(h)
            other = unmatched[rng.integers(len(unmatched))]
            take(other)
            y = owner[other]
            if y in dist and dist[y] == R:
                edges.append((x, y))
    return MultiGraph(dn.n, edges)


# ---------------------------------------------------------------------------
# local structure


def bfs_distances(g: MultiGraph, v: int, R: int | None = None) -> dict[int, int]:
    dist = {v: 0}
    queue = deque([v])
    nbr, ptr = g.nbr, g.indptr
    while queue:
        x = queue.popleft()
        dx = dist[x]
        if R is not None and dx >= R:
            continue
        for y in nbr[ptr[x]:ptr[x + 1]].tolist():
            if y not in dist:
                dist[y] = dx + 1
                queue.append(y)
    return dist


@dataclass
class Ball:
    center: int
    radius: int
    vertices: list          # original ids, BFS order (center first)
    edge_ids: list          # original edge ids with both endpoints in the ball
    boundary: list          # original ids at distance exactly radius
    graph: MultiGraph       # relabelled: vertices[i] -> i
    local: dict = field(repr=False, default_factory=dict)

    def to_local(self, v: int) -> int:
        return self.local[v]


def ball(g: MultiGraph, v: int, R: int) -> Ball:
    """Induced subgraph on B_R(v) with edge set E(B_R(v))."""
    if not 0 <= v < g.n:
        raise InvalidInputError("vertex out of range")
    if R < 0:
        raise InvalidInputError("radius must be >= 0")
    dist = bfs_distances(g, v, R)
    verts = list(dist)
    local = {w: i for i, w in enumerate(verts)}
    eids, local_edges = [], []
    seen = set()
    for w in verts:
        for e in g.incident(w).tolist():
            if e in seen:
                continue
            a, b = g.endpoints(e)
            if a in local and b in local:
                seen.add(e)
                eids.append(e)
    eids.sort()
    for e in eids:
        a, b = g.endpoints(e)
        local_edges.append((local[a], local[b]))
    boundary = [w for w in verts if dist[w] == R]
    return Ball(v, R, verts, eids, boundary, MultiGraph(len(verts), local_edges), local)


def cycle_excess(g: MultiGraph) -> int:
    """|E| - |V| + (#components): edges to delete to leave a forest."""
    return g.m - g.n + count_graph_components(g)


def count_graph_components(g: MultiGraph) -> int:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = g.n
    for a, b in g.edges.tolist():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps


@dataclass
class TreelikeReport:
    ok: bool
    max_excess: int
    worst_vertex: int

    def __bool__(self):
        return bool(self.ok)


def is_LR_treelike(g: MultiGraph, L: int, R: int) -> TreelikeReport:
    worst, worst_v = -1, -1
    for v in range(g.n):
        ex = cycle_excess(ball(g, v, R).graph)
        if ex > worst:
            worst, worst_v = ex, v
    worst = max(worst, 0)
    return TreelikeReport(worst <= L, worst, worst_v)


@dataclass
class GrowthReport:
    ok: bool
    worst_vertex: int
    worst_radius: int
    worst_ratio: float      # max |B_r(v)| / gamma^r over the window
    window: tuple

    def __bool__(self):
        return bool(self.ok)


def volume_growth_window(n: int, gamma: float, eps: float) -> range:
    lg = math.log(n) / math.log(gamma) if n > 1 else 0.0
    lo = math.ceil(eps * lg - 1e-12)
    hi = math.floor(0.5 * lg + 1e-12)
    return range(max(lo, 0), hi + 1)


def has_volume_growth(g: MultiGraph, gamma: float, eps: float) -> GrowthReport:
    """Check |B_r(v)| <= gamma^r for every v and integer r in [eps log n, log n / 2]."""
    if not gamma > 1:
        raise InvalidInputError("gamma must exceed 1")
    if not 0 < eps < 0.5:
        raise InvalidInputError("eps must lie in (0, 1/2)")
    window = volume_growth_window(g.n, gamma, eps)
    if len(window) == 0:
        return GrowthReport(True, -1, -1, 0.0, (window.start, window.stop - 1))
    rmax = window.stop - 1
    worst = (-math.inf, -1, -1)
    for v in range(g.n):
        dist = bfs_distances(g, v, rmax)
        counts = np.bincount(np.fromiter(dist.values(), dtype=np.int64), minlength=rmax + 1)
        sizes = np.cumsum(counts)
        for r in window:
            ratio = sizes[r] / gamma**r
            if ratio > worst[0]:
                worst = (ratio, v, r)
    ratio, v, r = worst
    return GrowthReport(bool(ratio <= 1.0), v, r, float(ratio), (window.start, rmax))
