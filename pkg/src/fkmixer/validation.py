"""The ``small-oracles`` validation suite: exact-enumeration properties that run in seconds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .connectivity import new_oracle
from .graphs import MultiGraph, complete_graph, path_graph, star_graph
from .rc_core import (BoundaryPartition, RcParams, config_from_mask, es_pushforward,
                      exact_potts_distribution, exact_rc_distribution, partition_distance)
from .rng import stream
from .thresholds import TreeSpec, p_u, tree_from_offspring, tree_phi, tree_phi_partition


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def __post_init__(self):
        self.ok = bool(self.ok)


SMALL_GRAPHS = {
    "single-edge": MultiGraph(2, [(0, 1)]),
    "path-3": path_graph(3),
    "triangle": complete_graph(3),
    "star-3": star_graph(3),
    "triangle+pendant": MultiGraph(4, [(0, 1), (1, 2), (2, 0), (2, 3)]),
    "double-edge": MultiGraph(2, [(0, 1), (0, 1)]),
    "loop+edge": MultiGraph(2, [(0, 0), (0, 1)]),
}


def random_graph(rng, max_n: int, max_m: int) -> MultiGraph:
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    return MultiGraph(n, rng.integers(0, n, size=(m, 2)))


def random_partition(rng, n: int) -> BoundaryPartition:
    k = int(rng.integers(1, n + 1))
    return BoundaryPartition.from_labels(rng.integers(0, k, size=n))


def random_tree(rng, max_edges: int) -> TreeSpec:
    counts = []
    total = 0
    frontier = 1
    while frontier and total < max_edges:
        c = int(rng.integers(0, 4))
        c = min(c, max_edges - total)
        counts.append(c)
        total += c
        frontier += c - 1
    if total == 0:
        counts = [1]
    return tree_from_offspring(counts)


def tree_connection_exact(tree: TreeSpec, params: RcParams) -> float:
    """P(root ~ boundary) by enumerating the tree with its boundary wired."""
    g = tree.to_graph()
    bnd = tree.boundary()
    bc = BoundaryPartition(g.n, [bnd]) if len(bnd) > 1 else BoundaryPartition(g.n)
    return exact_rc_distribution(g, bc, params).connection_probability(tree.root, bnd[0])


def check_single_edge() -> CheckResult:
    g = SMALL_GRAPHS["single-edge"]
    worst = 0.0
    for p, q in itertools.product([0.1, 0.3, 0.5, 0.7, 0.9], [1, 1.5, 2, 3, 5]):
        par = RcParams(p, q)
        worst = max(worst, abs(exact_rc_distribution(g, None, par).edge_marginals()[0] - par.phat))
    return CheckResult("single-edge marginal equals phat", worst < 1e-12, f"max error {worst:.2e}")


def check_normalization() -> CheckResult:
    worst = 0.0
    for g in SMALL_GRAPHS.values():
        for q in (0.5, 1, 2, 3):
            worst = max(worst, abs(exact_rc_distribution(g, None, RcParams(0.4, q)).probabilities.sum() - 1))
    return CheckResult("exact tables normalized", worst < 1e-10, f"max error {worst:.2e}")


def check_edwards_sokal() -> CheckResult:
    worst = 0.0
    for g in SMALL_GRAPHS.values():
        for q in (2, 3):
            par = RcParams(0.45, q)
            push = es_pushforward(exact_rc_distribution(g, None, par), q)
            potts = exact_potts_distribution(g, par.beta, q).probabilities
            worst = max(worst, 0.5 * float(np.abs(push - potts).sum()))
    return CheckResult("Edwards-Sokal pushforward equals Potts", worst <= 1e-10, f"max TV {worst:.2e}")


def check_boundary_bound(instances: int = 20, seed: int = 0) -> CheckResult:
    rng = stream(seed, "validate", "boundary-bound")
    worst = -math.inf
    for _ in range(instances):
        g = random_graph(rng, 6, 7)
        a, b = random_partition(rng, g.n), random_partition(rng, g.n)
        q = float(rng.choice([1.5, 2.0, 3.0]))
        par = RcParams(float(rng.uniform(0.1, 0.9)), q)
        D = partition_distance(a, b)
        la = exact_rc_distribution(g, a, par)
        lb = exact_rc_distribution(g, b, par)
        logr = (la.log_weights - la.log_partition) - (lb.log_weights - lb.log_partition)
        worst = max(worst, float(np.abs(logr).max() - 2 * D * math.log(q)))
    return CheckResult("boundary perturbation within q^(2D)", worst <= 1e-9, f"max excess {worst:.2e}")


def check_tree_phi(instances: int = 50, seed: int = 0) -> CheckResult:
    rng = stream(seed, "validate", "tree-phi")
    worst = 0.0
    for _ in range(instances):
        tree = random_tree(rng, 12)
        par = RcParams(float(rng.uniform(0.05, 0.95)), float(rng.choice([1.0, 1.5, 2.0, 3.0])))
        exact = tree_connection_exact(tree, par)
        worst = max(worst, abs(tree_phi(tree, par) - exact), abs(tree_phi_partition(tree, par) - exact))
    return CheckResult("tree recursion equals enumeration", worst <= 1e-10, f"max error {worst:.2e}")


def check_thresholds() -> CheckResult:
    e1 = abs(p_u(1, 2) - 0.5)
    e2 = abs(p_u(2, 2) - 2 / 3)
    return CheckResult("p_u(1,2)=1/2 and p_u(2,2)=2/3", max(e1, e2) <= 1e-8, f"errors {e1:.1e}, {e2:.1e}")


def check_monotone_boundary() -> CheckResult:
    """Coarser boundaries raise every edge marginal (q >= 1)."""
    worst = -math.inf
    g = SMALL_GRAPHS["triangle+pendant"]
    parts = [BoundaryPartition(4), BoundaryPartition(4, [(0, 3)]), BoundaryPartition(4, [(0, 1, 3)]),
             BoundaryPartition.wired(4, range(4))]
    for q in (1.5, 2, 3):
        par = RcParams(0.4, q)
        margs = [exact_rc_distribution(g, bc, par).edge_marginals() for bc in parts]
        for lo, hi in zip(margs, margs[1:]):
            worst = max(worst, float((lo - hi).max()))
    return CheckResult("marginals increase with coarser boundary", worst <= 1e-12, f"max decrease {worst:.2e}")


def check_oracles(graphs: int = 10, ops: int = 500, seed: int = 0) -> CheckResult:
    rng = stream(seed, "validate", "oracles")
    mismatches = 0
    for _ in range(graphs):
        g = random_graph(rng, 20, 40)
        bc = random_partition(rng, g.n) if rng.random() < 0.5 else None
        omega = rng.random(g.m) < 0.5
        oracles = [new_oracle(g, bc, omega, b) for b in ("naive", "hdt", "search")]
        for _ in range(ops):
            kind = rng.integers(3)
            if kind == 0:
                e, s = int(rng.integers(g.m)), bool(rng.random() < 0.5)
                for o in oracles:
                    o.set_edge(e, s)
                continue
            if kind == 1:
                e = int(rng.integers(g.m))
                ans = [o.is_cut_edge(e) for o in oracles]
            else:
                a, b = (int(x) for x in rng.integers(g.n, size=2))
                ans = [o.connected(a, b) for o in oracles]
            mismatches += len(set(ans)) != 1
    return CheckResult("connectivity backends agree", mismatches == 0, f"{mismatches} mismatches")


def check_cut_edge_definition(seed: int = 0) -> CheckResult:
    """is_cut_edge(e) iff flipping e changes the component count."""
    from .rc_core import count_components
    rng = stream(seed, "validate", "cut-edge")
    bad = 0
    for _ in range(20):
        g = random_graph(rng, 6, 8)
        bc = random_partition(rng, g.n)
        for mask in range(min(1 << g.m, 64)):
            w = config_from_mask(mask, g.m)
            o = new_oracle(g, bc, w, "naive")
            for e in range(g.m):
                w2 = w.copy()
                w2[e] = not w2[e]
                changed = count_components(g, w, bc) != count_components(g, w2, bc)
                bad += o.is_cut_edge(e) != changed
    return CheckResult("cut-edge iff component count changes", bad == 0, f"{bad} disagreements")


SUITES = {
    "small-oracles": [check_single_edge, check_normalization, check_edwards_sokal, check_boundary_bound,
                      check_tree_phi, check_thresholds, check_monotone_boundary, check_oracles,
                      check_cut_edge_definition],
}


def run_suite(name: str) -> list[CheckResult]:
    return [check() for check in SUITES[name]]
