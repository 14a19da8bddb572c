"""Random-cluster and Potts measures, boundary partitions and exact oracles.

Spins are stored 0-based: spin ``i`` here is spin ``i + 1`` in the usual
{1, ..., q} labelling, so "spin 1" is index 0.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .errors import InvalidInputError, TooLargeError
from .graphs import MultiGraph
from .rng import as_generator

MAX_EXACT_EDGES = 22
MAX_POTTS_STATES = 10**7


@dataclass(frozen=True)
class RcParams:
    p: float
    q: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise InvalidInputError(f"p must lie in (0, 1), got {self.p}")
        if not self.q > 0:
            raise InvalidInputError(f"q must be positive, got {self.q}")

    @property
    def phat(self) -> float:
        """Open probability at a cut-edge, p / (q(1-p) + p)."""
        if self.q == 1:
            return self.p
        return self.p / (self.q * (1 - self.p) + self.p)

    @property
    def beta(self) -> float:
        """Potts inverse temperature matched by p = 1 - exp(-beta)."""
        return -math.log1p(-self.p)

    @classmethod
    def from_beta(cls, beta: float, q: float) -> "RcParams":
        return cls(-math.expm1(-beta), q)


class BoundaryPartition:
    """Partition of ``range(universe)``; only non-singleton classes are stored.

    The free boundary condition is ``BoundaryPartition(n)``; wiring a set S is
    ``BoundaryPartition(n, [S])``.
    """

    __slots__ = ("universe", "classes")

    def __init__(self, universe: int, classes: Iterable[Iterable[int]] = ()):
        self.universe = int(universe)
        seen = set()
        kept = []
        for c in classes:
            c = frozenset(int(x) for x in c)
            if not c:
                raise InvalidInputError("boundary classes must be nonempty")
            if seen & c:
                raise InvalidInputError("boundary classes must be disjoint")
            if any(not 0 <= x < self.universe for x in c):
                raise InvalidInputError("boundary class vertex outside the universe")
            seen |= c
            if len(c) >= 2:
                kept.append(tuple(sorted(c)))
        self.classes = tuple(sorted(kept))

    @classmethod
    def free(cls, universe: int) -> "BoundaryPartition":
        return cls(universe)

    @classmethod
    def wired(cls, universe: int, vertices: Iterable[int]) -> "BoundaryPartition":
        return cls(universe, [list(vertices)])

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "BoundaryPartition":
        groups: dict = {}
        for v, lab in enumerate(labels):
            groups.setdefault(lab, []).append(v)
        return cls(len(labels), groups.values())

    def labels(self) -> np.ndarray:
        lab = np.arange(self.universe)
        for c in self.classes:
            lab[list(c)] = c[0]
        return lab

    def num_classes(self) -> int:
        return self.universe - sum(len(c) - 1 for c in self.classes)

    def merge_pairs(self) -> list[tuple[int, int]]:
        """A spanning star per class, used as permanent phantom edges."""
        return [(c[0], x) for c in self.classes for x in c[1:]]

    def __le__(self, other: "BoundaryPartition") -> bool:
        """Refinement order: self <= other if every class of self lies in one of other."""
        _check_universe(self, other)
        lab = other.labels()
        return all(len({lab[x] for x in c}) == 1 for c in self.classes)

    def __ge__(self, other):
        return other <= self

    def __eq__(self, other):
        return (isinstance(other, BoundaryPartition) and self.universe == other.universe
                and self.classes == other.classes)

    def __hash__(self):
        return hash((self.universe, self.classes))

    def __repr__(self):
        return f"BoundaryPartition({self.universe}, {list(map(list, self.classes))})"


def _check_universe(a: BoundaryPartition, b: BoundaryPartition):
    if a.universe != b.universe:
        raise InvalidInputError("partitions live on different vertex sets")


def join(a: BoundaryPartition, b: BoundaryPartition) -> BoundaryPartition:
    """Smallest partition coarser than both."""
    _check_universe(a, b)
    parent = list(range(a.universe))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in a.merge_pairs() + b.merge_pairs():
        parent[find(u)] = find(v)
    return BoundaryPartition.from_labels([find(x) for x in range(a.universe)])


def partition_distance(a: BoundaryPartition, b: BoundaryPartition) -> int:
    """c(a) - c(j) + c(b) - c(j) with j the join; equals |c(a) - c(b)| for comparable pairs."""
    j = join(a, b)
    return a.num_classes() + b.num_classes() - 2 * j.num_classes()


def sparsity(bc: BoundaryPartition) -> int:
    """Number of vertices in non-singleton classes."""
    return sum(len(c) for c in bc.classes)


# ---------------------------------------------------------------------------
# configurations


def as_config(g: MultiGraph, omega) -> np.ndarray:
    w = np.asarray(omega, dtype=bool)
    if w.shape != (g.m,):
        raise InvalidInputError(f"configuration has length {w.shape}, graph has {g.m} edges")
    return w


def config_from_mask(mask: int, m: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(m)], dtype=bool)


def config_to_mask(omega) -> int:
    return int(sum(1 << i for i, x in enumerate(omega) if x))


def count_components(g: MultiGraph, omega, bc: BoundaryPartition | None = None) -> int:
    """c(omega; bc): components of the open subgraph after merging boundary classes."""
    return len(np.unique(component_labels(g, omega, bc)))


def component_labels(g: MultiGraph, omega, bc: BoundaryPartition | None = None) -> np.ndarray:
    omega = as_config(g, omega)
    eu, ev = g.edges[:, 0], g.edges[:, 1]
    if bc is not None and bc.classes:
        pairs = np.asarray(bc.merge_pairs(), dtype=np.int64)
        eu = np.concatenate([eu, pairs[:, 0]])
        ev = np.concatenate([ev, pairs[:, 1]])
        omega = np.concatenate([omega, np.ones(len(pairs), dtype=bool)])
    return _kernels.component_labels(g.n, np.ascontiguousarray(eu), np.ascontiguousarray(ev), omega)


def cluster_sizes(g: MultiGraph, omega) -> np.ndarray:
    lab = component_labels(g, omega)
    return np.bincount(np.unique(lab, return_inverse=True)[1])


def rc_weight(g: MultiGraph, bc: BoundaryPartition, params: RcParams, omega) -> float:
    """Log of p^|w| (1-p)^(|E|-|w|) q^c(w; bc)."""
    omega = as_config(g, omega)
    k = int(omega.sum())
    c = count_components(g, omega, bc)
    return k * math.log(params.p) + (g.m - k) * math.log1p(-params.p) + c * math.log(params.q)


class ExactRcDistribution:
    """Brute-force random-cluster law over all 2^|E| configurations.

    Configuration ``mask`` opens edge i iff bit i is set.
    """

    def __init__(self, g: MultiGraph, bc: BoundaryPartition, params: RcParams,
                 max_edges: int = MAX_EXACT_EDGES):
        if g.m > max_edges:
            raise TooLargeError(f"{g.m} edges exceeds the enumeration cap of {max_edges}")
        if bc.universe != g.n:
            raise InvalidInputError("boundary partition universe must match the graph")
        self.graph, self.bc, self.params = g, bc, params
        self._eu = np.ascontiguousarray(g.edges[:, 0])
        self._ev = np.ascontiguousarray(g.edges[:, 1])
        merges = np.asarray(bc.merge_pairs(), dtype=np.int64).reshape(-1, 2)
        self._mu = np.ascontiguousarray(merges[:, 0])
        self._mv = np.ascontiguousarray(merges[:, 1])
        none = np.zeros(0, dtype=np.int64)
        counts, _ = _kernels.enumerate_components(g.n, self._eu, self._ev, self._mu, self._mv, none, none)
        self.components = counts
        masks = np.arange(1 << g.m, dtype=np.int64)
        self.open_counts = _popcount(masks, g.m)
        lw = (self.open_counts * math.log(params.p)
              + (g.m - self.open_counts) * math.log1p(-params.p)
              + counts * math.log(params.q))
        self.log_weights = lw
        self.log_partition = float(logsumexp(lw))
        self.probabilities = np.exp(lw - self.log_partition)

    def __len__(self):
        return len(self.probabilities)

    def prob(self, omega) -> float:
        return float(self.probabilities[config_to_mask(omega)])

    def edge_marginals(self) -> np.ndarray:
        m = self.graph.m
        masks = np.arange(len(self.probabilities))
        return np.array([self.probabilities[(masks >> i) & 1 == 1].sum() for i in range(m)])

    def connection_probability(self, a: int, b: int) -> float:
        """P(a and b in the same component), boundary identifications included."""
        return float(self.connection_probabilities([(a, b)])[0])

    def connection_probabilities(self, pairs) -> np.ndarray:
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        _, conn = _kernels.enumerate_components(
            self.graph.n, self._eu, self._ev, self._mu, self._mv,
            np.ascontiguousarray(pairs[:, 0]), np.ascontiguousarray(pairs[:, 1]))
        return self.probabilities @ conn

    def marginal_on(self, edge_ids: Sequence[int]) -> np.ndarray:
        """Law of omega restricted to ``edge_ids``, indexed by the sub-bitmask."""
        masks = np.arange(len(self.probabilities))
        sub = np.zeros_like(masks)
        for j, e in enumerate(edge_ids):
            sub |= ((masks >> e) & 1) << j
        return np.bincount(sub, weights=self.probabilities, minlength=1 << len(edge_ids))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["config_bitmask", "log_weight", "probability"])
            for mask, (lw, pr) in enumerate(zip(self.log_weights, self.probabilities)):
                w.writerow([mask, repr(float(lw)), repr(float(pr))])


def exact_rc_distribution(g: MultiGraph, bc: BoundaryPartition | None, params: RcParams,
                          max_edges: int = MAX_EXACT_EDGES) -> ExactRcDistribution:
    return ExactRcDistribution(g, bc if bc is not None else BoundaryPartition(g.n), params, max_edges)


def _popcount(masks: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros_like(masks)
    for i in range(m):
        out += (masks >> i) & 1
    return out


# ---------------------------------------------------------------------------
# Potts


def disagreements(g: MultiGraph, sigma) -> int:
    sigma = np.asarray(sigma)
    if g.m == 0:
        return 0
    return int(np.sum(sigma[g.edges[:, 0]] != sigma[g.edges[:, 1]]))


def potts_weight(g: MultiGraph, beta: float, sigma) -> float:
    """Log of the unnormalised Potts weight, -beta * (number of disagreeing edges)."""
    return -beta * disagreements(g, sigma)


class ExactPottsDistribution:
    """Potts law over all q^n spin vectors; state code is sum sigma_v q^v."""

    def __init__(self, g: MultiGraph, beta: float, q: int, max_states: int = MAX_POTTS_STATES):
        q = int(q)
        if q < 2:
            raise InvalidInputError("Potts needs integer q >= 2")
        if q**g.n > max_states:
            raise TooLargeError(f"{q}^{g.n} states exceeds the cap of {max_states}")
        self.graph, self.beta, self.q = g, beta, q
        codes = np.arange(q**g.n, dtype=np.int64)
        self.spins = np.stack([(codes // q**v) % q for v in range(g.n)], axis=1) if g.n else np.zeros((1, 0), dtype=np.int64)
        dis = np.zeros(len(codes), dtype=np.int64)
        for a, b in g.edges.tolist():
            dis += self.spins[:, a] != self.spins[:, b]
        self.disagreements = dis
        lw = -beta * dis
        self.log_weights = lw
        self.log_partition = float(logsumexp(lw))
        self.probabilities = np.exp(lw - self.log_partition)

    def prob(self, sigma) -> float:
        code = sum(int(s) * self.q**v for v, s in enumerate(sigma))
        return float(self.probabilities[code])

    def agreement_probability(self, a: int, b: int) -> float:
        return float(self.probabilities[self.spins[:, a] == self.spins[:, b]].sum())

    def edge_agreements(self) -> np.ndarray:
        return np.array([self.agreement_probability(a, b) for a, b in self.graph.edges.tolist()])


def exact_potts_distribution(g: MultiGraph, beta: float, q: int,
                             max_states: int = MAX_POTTS_STATES) -> ExactPottsDistribution:
    return ExactPottsDistribution(g, beta, q, max_states)


def es_coloring(g: MultiGraph, omega, q: int, seed, bc: BoundaryPartition | None = None) -> np.ndarray:
    """Give each open cluster an independent uniform spin in 0..q-1."""
    q = int(q)
    if q < 2:
        raise InvalidInputError("coloring needs integer q >= 2")
    rng = as_generator(seed, "es-coloring")
    lab = component_labels(g, omega, bc)
    _, inv = np.unique(lab, return_inverse=True)
    colors = rng.integers(q, size=inv.max() + 1 if len(inv) else 0)
    return colors[inv].astype(np.int64)


def es_pushforward(dist: ExactRcDistribution, q: int) -> np.ndarray:
    """Exact Potts law obtained by coloring RC clusters uniformly.

    Returns probabilities indexed by the same state code as ExactPottsDistribution.
    """
    g = dist.graph
    q = int(q)
    n = g.n
    codes = np.arange(q**n, dtype=np.int64)
    spins = np.stack([(codes // q**v) % q for v in range(n)], axis=1) if n else np.zeros((1, 0), dtype=np.int64)
    out = np.zeros(len(codes))
    for mask, pr in enumerate(dist.probabilities):
        if pr == 0.0:
            continue
        omega = config_from_mask(mask, g.m)
        lab = component_labels(g, omega, dist.bc)
        ok = np.ones(len(codes), dtype=bool)
        for v in range(n):
            if lab[v] != v:
                ok &= spins[:, v] == spins[:, lab[v]]
        c = len(np.unique(lab))
        out[ok] += pr * float(q) ** (-c)
    return out


# ---------------------------------------------------------------------------
# boundaries induced from outside a ball


def induced_boundary(g: MultiGraph, omega, ball_vertices: Sequence[int],
                     ball_edges: Iterable[int] | None = None) -> BoundaryPartition:
    """Partition of the ball's vertices by connectivity through open edges outside E(ball).

    The returned partition is indexed by position in ``ball_vertices``.
    ``omega`` is a full configuration on g; its values on E(ball) are ignored.
    """
    omega = as_config(g, omega)
    verts = list(ball_vertices)
    inside = np.zeros(g.n, dtype=bool)
    inside[verts] = True
    if ball_edges is None:
        in_ball = inside[g.edges[:, 0]] & inside[g.edges[:, 1]] if g.m else np.zeros(0, dtype=bool)
    else:
        in_ball = np.zeros(g.m, dtype=bool)
        in_ball[list(ball_edges)] = True
    outside_open = omega & ~in_ball
    lab = component_labels(g, outside_open)
    return BoundaryPartition.from_labels([lab[v] for v in verts])


def all_partitions(items: Sequence[int]):
    """Every set partition of ``items`` (as lists of blocks)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def sparse_partitions(universe: int, vertices: Sequence[int], K: int):
    """Partitions of ``vertices`` with at most K vertices in non-singleton classes."""
    vertices = list(vertices)
    for size in range(0, min(K, len(vertices)) + 1):
        if size == 1:
            continue
        for subset in itertools.combinations(vertices, size):
            for part in all_partitions(subset):
                if all(len(b) >= 2 for b in part):
                    yield BoundaryPartition(universe, part)
