"""Uniqueness threshold p_u(q, gamma) and exact tree recursions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidInputError
from .rc_core import RcParams

_GOLDEN = (math.sqrt(5) - 1) / 2


def h_func(y: float, q: float, gamma: float) -> float:
    """(y-1)(y^gamma + q - 1) / (y^gamma - y) for y > 1."""
    if not y > 1:
        raise InvalidInputError("h is defined for y > 1")
    return _h_log(math.log(y), q, gamma)


def _h_log(s: float, q: float, gamma: float) -> float:
    # y = e^s; expm1 keeps the y -> 1 end accurate
    return math.expm1(s) * (math.exp(gamma * s) + q - 1) / (math.exp(s) * math.expm1((gamma - 1) * s))


def g_func(x: float, params: RcParams) -> float:
    """Tree recursion map; g(+inf) = 1/(1-p)."""
    p, q = params.p, params.q
    if math.isinf(x) and x > 0:
        return 1.0 / (1.0 - p)
    if not x >= 1:
        raise InvalidInputError("g is defined for x >= 1")
    return (x + (q - 1) * (1 - p)) / ((1 - p) * x + p + (q - 1) * (1 - p))


def _g_minus_one(s: float, p: float, q: float) -> float:
    # g(1 + s) - 1 = p s / ((1-p)(1+s) + p + (q-1)(1-p))
    return p * s / ((1 - p) * (1 + s) + p + (q - 1) * (1 - p))


@dataclass
class HMinimum:
    value: float          # inf_{y>1} h(y)
    argmin: float         # minimising y; 1.0 when the y -> 1 limit wins
    at_endpoint: bool


def h_infimum(q: float, gamma: float) -> HMinimum:
    """inf over y > 1 of h, by coarse scan in log y plus golden-section refinement.

    The y -> 1 limit q/(gamma-1) is always a candidate.
    """
    if not gamma > 1:
        raise InvalidInputError("gamma must exceed 1")
    if not q > 0:
        raise InvalidInputError("q must be positive")
    lo, hi = 1e-12, 20.0
    grid = np.geomspace(lo, hi, 400)
    vals = np.array([_h_log(s, q, gamma) for s in grid])
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    s_best = _golden_min(lambda s: _h_log(s, q, gamma), a, b)
    best = min(_h_log(s_best, q, gamma), vals[i])
    endpoint = q / (gamma - 1)
    # interior points next to y = 1 can undercut the limit by rounding alone
    if endpoint <= best * (1 + 1e-12):
        return HMinimum(endpoint, 1.0, True)
    return HMinimum(float(best), math.exp(s_best), False)


def _golden_min(f, a: float, b: float, tol: float = 1e-14) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if abs(b - a) <= tol * (abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2


def p_u(q: float, gamma: float) -> float:
    """Uniqueness threshold 1 - 1/(1 + inf_{y>1} h(y))."""
    if q < 1:
        raise InvalidInputError("p_u is defined for q >= 1")
    inf_h = h_infimum(q, gamma).value
    return inf_h / (1.0 + inf_h)


def beta_u(q: float, gamma: float) -> float:
    """Potts uniqueness point -ln(1 - p_u)."""
    return -math.log1p(-p_u(q, gamma))


@dataclass
class AlternateFormReport:
    ok: bool
    sup_gap: float       # sup over x>1 of (g(x) - x^(1/gamma)) / (x - 1)
    argsup: float

    def __bool__(self):
        return bool(self.ok)


def alternate_form_gap(p: float, q: float, gamma: float, s: float) -> float:
    """(g_p(x) - x^(1/gamma)) / (x - 1) at x = 1 + s, accurate for tiny s."""
    if s == 0.0:
        return RcParams(p, q).phat - 1.0 / gamma
    return (_g_minus_one(s, p, q) - math.expm1(math.log1p(s) / gamma)) / s


def check_alternate_form(p: float, q: float, gamma: float, tol: float = 1e-9) -> AlternateFormReport:
    """Is sup_{x>1} g_p(x) - x^(1/gamma) <= 0?

    The gap is divided by (x - 1) > 0, which leaves its sign unchanged but keeps
    near-threshold values well above rounding error.  The sup is taken over a
    log-spaced grid of x - 1 in [1e-12, 1e4] and the x -> 1 limit, followed by
    golden-section refinement around the best grid point.
    """
    if not 0 < p < 1:
        raise InvalidInputError("p must lie in (0, 1)")
    grid = np.concatenate([[0.0], np.geomspace(1e-12, 1e4, 2000)])
    vals = np.array([alternate_form_gap(p, q, gamma, s) for s in grid])
    i = int(np.argmax(vals))
    best_s, best = grid[i], vals[i]
    if 0 < i < len(grid) - 1:
        a, b = grid[i - 1], grid[i + 1]
        s = _golden_min(lambda s: -alternate_form_gap(p, q, gamma, s), a, b)
        v = alternate_form_gap(p, q, gamma, s)
        if v > best:
            best_s, best = s, v
    return AlternateFormReport(best <= tol, float(best), 1.0 + float(best_s))


def largest_g_exponent_slack(params: RcParams, gamma: float, xs: Sequence[float]) -> float:
    """Largest xi with g(x) <= x^(1/gamma - xi) at every x > 1 in ``xs``."""
    xi = math.inf
    for x in xs:
        if x <= 1:
            continue
        # g(x) <= x^(1/gamma - xi)  <=>  xi <= 1/gamma - log g(x) / log x
        xi = min(xi, 1.0 / gamma - math.log(g_func(x, params)) / math.log(x))
    return xi


# ---------------------------------------------------------------------------
# trees


@dataclass
class TreeSpec:
    """Rooted tree given by a parent array (root has parent -1) and a height h.

    The boundary is the set of vertices at depth exactly h.
    """

    parent: tuple
    height: int
    depth: tuple = field(init=False)
    children: tuple = field(init=False, repr=False)
    root: int = field(init=False)

    def __post_init__(self):
        par = tuple(int(x) for x in self.parent)
        object.__setattr__(self, "parent", par)
        n = len(par)
        roots = [v for v, pv in enumerate(par) if pv < 0]
        if len(roots) != 1:
            raise InvalidInputError("a tree needs exactly one root")
        kids = [[] for _ in range(n)]
        for v, pv in enumerate(par):
            if pv >= 0:
                if not 0 <= pv < n:
                    raise InvalidInputError("parent index out of range")
                kids[pv].append(v)
        depth = [-1] * n
        depth[roots[0]] = 0
        order = [roots[0]]
        for v in order:
            for w in kids[v]:
                depth[w] = depth[v] + 1
                order.append(w)
        if len(order) != n:
            raise InvalidInputError("parent array has a cycle or is disconnected")
        if self.height < 0:
            raise InvalidInputError("height must be >= 0")
        if max(depth) > self.height:
            raise InvalidInputError("tree is deeper than its stated height")
        self.root = roots[0]
        self.depth = tuple(depth)
        self.children = tuple(tuple(k) for k in kids)
        self._order = order

    @property
    def n(self) -> int:
        return len(self.parent)

    def boundary(self) -> list[int]:
        return [v for v in range(self.n) if self.depth[v] == self.height]

    def edges(self) -> list[tuple[int, int]]:
        return [(pv, v) for v, pv in enumerate(self.parent) if pv >= 0]

    def bottom_up(self):
        return reversed(self._order)

    def to_graph(self):
        from .graphs import MultiGraph
        return MultiGraph(self.n, self.edges())


def regular_tree(branching: int, height: int) -> TreeSpec:
    """Complete ``branching``-ary tree of the given height, root 0."""
    parent = [-1]
    frontier = [0]
    for _ in range(height):
        nxt = []
        for v in frontier:
            for _ in range(branching):
                parent.append(v)
                nxt.append(len(parent) - 1)
        frontier = nxt
    return TreeSpec(tuple(parent), height)


def tree_from_offspring(counts: Sequence[int]) -> TreeSpec:
    """Tree whose vertices, in BFS order, have the given numbers of children."""
    parent = [-1]
    head = 0
    for c in counts:
        if head >= len(parent):
            break
        parent.extend([head] * c)
        head += 1
    depth = [0] * len(parent)
    for v in range(1, len(parent)):
        depth[v] = depth[parent[v]] + 1
    return TreeSpec(tuple(parent), max(depth))


def tree_recursion(tree: TreeSpec, params: RcParams) -> list[float]:
    """f(v) = prod over children of g(f(w)), with f = +inf on the boundary.

    Leaves off the boundary have f = 1.  Returns f for every vertex.
    """
    if params.q < 1:
        raise InvalidInputError("tree recursion needs q >= 1")
    f = [1.0] * tree.n
    for v in tree.bottom_up():
        if tree.depth[v] == tree.height:
            f[v] = math.inf
            continue
        val = 1.0
        for w in tree.children[v]:
            val *= g_func(f[w], params)
        f[v] = val
    return f


def tree_phi(tree: TreeSpec, params: RcParams) -> float:
    """P(root connected to the wired boundary) under the wired-leaves measure."""
    if tree.height == 0:
        return 1.0
    f = tree_recursion(tree, params)[tree.root]
    return (f - 1.0) / (f - 1.0 + params.q)


def regular_tree_phi(branching: int, height: int, params: RcParams) -> float:
    """tree_phi on the complete ``branching``-ary tree, one recursion step per level.

    Every vertex at a given depth carries the same f, so this costs O(height)
    and reaches heights whose trees would not fit in memory.
    """
    if params.q < 1:
        raise InvalidInputError("tree recursion needs q >= 1")
    if height == 0:
        return 1.0
    if branching == 0:
        return 0.0
    f = math.inf
    for _ in range(height):
        f = g_func(f, params) ** branching
    return (f - 1.0) / (f - 1.0 + params.q)


def tree_phi_partition(tree: TreeSpec, params: RcParams) -> float:
    """Same quantity via the Z_0/Z_1 recurrence, in log space.

    Z_1(v) (Z_0(v)) is the wired-boundary weight of configurations on the
    subtree at v with (without) an open v-to-boundary path.
    """
    p, q = params.p, params.q
    if tree.height == 0:
        return 1.0
    t = p / q + 1.0 - p
    lq, lp1, lt = math.log(q), math.log1p(-p), math.log(t)
    logz1 = [0.0] * tree.n
    logz0 = [0.0] * tree.n
    for v in tree.bottom_up():
        if tree.depth[v] == tree.height:
            # a boundary vertex is the wired boundary component itself
            logz1[v], logz0[v] = lq, -math.inf
            continue
        kids = tree.children[v]
        if not kids:
            logz1[v], logz0[v] = -math.inf, 2 * lq
            continue
        a_terms = [logsumexp([logz1[w], lt + logz0[w]]) - lq for w in kids]
        b_terms = [logsumexp([lp1 + logz1[w], lt + logz0[w]]) - lq for w in kids]
        la, lb = sum(a_terms), sum(b_terms)
        logz0[v] = 2 * lq + lb
        # Z_1 = q (A - B) with A >= B
        logz1[v] = lq + la + math.log1p(-math.exp(lb - la)) if la > lb else -math.inf
    r = tree.root
    return float(math.exp(logz1[r] - logsumexp([logz1[r], logz0[r]])))


@dataclass
class DecayFit:
    rate: float         # exp(slope) of log phi against h
    slope: float
    intercept: float
    heights: tuple
    dropped: int


def decay_fit(phis: Sequence[tuple[float, float]]) -> DecayFit:
    """Least-squares fit of log(phi) against h; the rate is exp(slope)."""
    pts = [(h, ph) for h, ph in phis if ph > 0]
    dropped = len(phis) - len(pts)
    if dropped:
        warnings.warn(f"decay_fit dropped {dropped} non-positive values", RuntimeWarning, stacklevel=2)
    if len(pts) < 3:
        raise InvalidInputError("decay_fit needs at least 3 positive values")
    h = np.array([x for x, _ in pts], dtype=float)
    y = np.log(np.array([v for _, v in pts], dtype=float))
    A = np.vstack([h, np.ones_like(h)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    return DecayFit(float(math.exp(slope)), float(slope), float(intercept), tuple(h), dropped)


# ---------------------------------------------------------------------------
# Galton-Watson trees


def sample_gw_generation_sizes(offspring_sampler, generations: int, rng: np.random.Generator,
                               cap: int = 10**7) -> list[int]:
    """Z_0 = 1, Z_1, ..., Z_generations of a Galton-Watson process.

    ``offspring_sampler(rng, k)`` returns k i.i.d. offspring counts.  Growth is
    stopped (sizes frozen at ``cap``) once a generation exceeds ``cap``.
    """
    sizes = [1]
    z = 1
    for _ in range(generations):
        if z == 0 or z >= cap:
            sizes.append(z if z == 0 else cap)
            z = sizes[-1]
            continue
        z = int(offspring_sampler(rng, z).sum())
        sizes.append(min(z, cap))
    return sizes


def gw_volume_tail(mean: float, gamma: float, levels: Sequence[int], samples: int, seed) -> dict:
    """Empirical P(Z_l >= gamma^l) for Poisson(mean) Galton-Watson trees."""
    from .rng import as_generator

    rng = as_generator(seed, "gw-volume-tail")
    top = max(levels)
    hits = {l: 0 for l in levels}
    for _ in range(samples):
        sizes = sample_gw_generation_sizes(lambda r, k: r.poisson(mean, size=k), top, rng)
        for l in levels:
            if sizes[l] >= gamma**l:
                hits[l] += 1
    return {l: hits[l] / samples for l in levels}
