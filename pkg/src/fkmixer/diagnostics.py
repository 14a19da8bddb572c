"""Measurements built on the dynamics: shattering, sparse induced boundaries,
influence decay on balls, coupling-time scaling and the Potts bottleneck."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .dynamics import CHUNK, FkChain, PottsChain, coupling_time
from .errors import InvalidInputError, TooLargeError
from .graphs import (MultiGraph, ball, planted_degree_sequence,
                     sample_configuration_model, sample_er_poisson_cloning, sample_simple_graph)
from .rc_core import (BoundaryPartition, RcParams, as_config, component_labels,
                      exact_potts_distribution, exact_rc_distribution, sparse_partitions)
from .rng import stream
from .thresholds import p_u

MAX_INFLUENCE_EDGES = 20
MAX_CONDUCTANCE_STATES = 10**6


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


class _Report:
    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        header, rows = self.table()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# graph families


@dataclass(frozen=True)
class GraphFamily:
    """Random graph family indexed by n.

    ``er``: Poisson(gamma) degrees, configuration model (growth rate gamma).
    ``regular``: all degrees gamma + 1, configuration model.
    ``single-edge``: one edge, n ignored.
    """

    kind: str
    gamma: float = 2.0

    def __post_init__(self):
        if self.kind not in ("er", "regular", "single-edge"):
            raise InvalidInputError(f"unknown graph family {self.kind!r}")

    def sample(self, n: int, seed) -> MultiGraph:
        if self.kind == "er":
            return sample_er_poisson_cloning(n, self.gamma, seed)
        if self.kind == "regular":
            d = int(round(self.gamma)) + 1
            return sample_configuration_model([d] * n, seed)
        return MultiGraph(2, [(0, 1)])


# ---------------------------------------------------------------------------
# shattering


@dataclass
class ShatterReport(_Report):
    n: int
    t: float
    p: float
    q: float
    seed: object
    max_cluster: list
    histograms: list                    # per sample: {cluster size: count}
    configs: list = field(default_factory=list, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = _plain({k: v for k, v in asdict(self).items() if k != "configs"})
        return d

    def fraction_at_most(self, bound: float) -> float:
        return float(np.mean(np.asarray(self.max_cluster) <= bound))

    def tail_frequencies(self, i: int) -> dict:
        """freq(size >= s) over clusters of sample i, for every size present."""
        hist = self.histograms[i]
        sizes = sorted(hist)
        total = sum(hist.values())
        out, acc = {}, 0
        for s in reversed(sizes):
            acc += hist[s]
            out[s] = acc / total
        return dict(sorted(out.items()))

    def table(self):
        return ["seed_index", "max_cluster"], [[i, m] for i, m in enumerate(self.max_cluster)]

    def histogram_table(self):
        agg: dict = {}
        for h in self.histograms:
            for s, c in h.items():
                agg[s] = agg.get(s, 0) + c
        return ["size", "count"], [[s, agg[s]] for s in sorted(agg)]


def _sizes_hist(g: MultiGraph, omega) -> dict:
    lab = component_labels(g, omega)
    sizes = np.bincount(np.unique(lab, return_inverse=True)[1])
    s, c = np.unique(sizes, return_counts=True)
    return {int(a): int(b) for a, b in zip(s, c)}


def shatter_stats(g: MultiGraph, params: RcParams, t: float, n_seeds: int, seed=0,
                  bc: BoundaryPartition | None = None, keep_configs: bool = False,
                  threads: int = 1) -> ShatterReport:
    """Run X^1 (all edges open) to time t for each seed and record cluster sizes."""
    if t < 0:
        raise InvalidInputError("time must be non-negative")

    def one(i):
        chain = FkChain(g, params, bc, np.ones(g.m, dtype=bool))
        chain.run_continuous(t, (seed, "shatter", i))
        return chain.config

    configs = _map(one, range(n_seeds), threads)
    hists = [_sizes_hist(g, w) for w in configs]
    return ShatterReport(g.n, float(t), params.p, params.q, seed,
                         [max(h) if h else 0 for h in hists], hists,
                         configs if keep_configs else [])


# ---------------------------------------------------------------------------
# (K, R)-sparse induced boundaries


class SparseCheck(NamedTuple):
    ok: bool
    max_sparsity: int
    argmax: int


def _ball_sparsity(g: MultiGraph, omega, b, glob) -> int:
    labs = glob[b.vertices]
    uniq, cnt = np.unique(labs, return_counts=True)
    shared = uniq[cnt >= 2]
    if shared.size == 0:
        return 0
    # only global clusters meeting the ball twice can join ball vertices outside it
    in_ball = np.zeros(g.m, dtype=bool)
    in_ball[b.edge_ids] = True
    cand = np.isin(glob, shared)
    sel = omega & ~in_ball & cand[g.edges[:, 0]]
    eu, ev = g.edges[sel, 0], g.edges[sel, 1]
    verts = np.unique(np.concatenate([eu, ev, np.asarray(b.vertices)]))
    local = np.searchsorted(verts, np.concatenate([eu, ev]))
    k = len(eu)
    lab = _kernels.component_labels(len(verts), local[:k], local[k:], np.ones(k, dtype=np.bool_))
    ball_lab = lab[np.searchsorted(verts, b.vertices)]
    _, inv, cnt2 = np.unique(ball_lab, return_inverse=True, return_counts=True)
    return int(np.sum(cnt2[inv] >= 2))


def kr_sparse_check(g: MultiGraph, omega, K: int, R: int, balls=None) -> SparseCheck:
    """Largest sparsity of the boundary induced on any B_R(v) from outside E(B_R(v))."""
    omega = as_config(g, omega)
    glob = component_labels(g, omega)
    best, arg = -1, -1
    for v in range(g.n):
        b = balls[v] if balls is not None else ball(g, v, R)
        s = _ball_sparsity(g, omega, b, glob)
        if s > best:
            best, arg = s, v
    if best < 0:
        best = 0
    return SparseCheck(best <= K, best, arg)


def all_balls(g: MultiGraph, R: int) -> list:
    return [ball(g, v, R) for v in range(g.n)]


# ---------------------------------------------------------------------------
# influence of the boundary on the edges at the center


@dataclass
class InfluenceReport(_Report):
    center: int
    K: int
    p: float
    q: float
    radii: list
    max_tv: list
    pairs_checked: list
    slope: float            # least-squares slope of log max_tv against R
    rate: float             # exp(slope)

    def table(self):
        return (["radius", "max_tv", "pairs"],
                [[r, tv, k] for r, tv, k in zip(self.radii, self.max_tv, self.pairs_checked)])


def center_edges(g: MultiGraph, v: int) -> list:
    return sorted({int(e) for e in g.incident(v)})


def influence_tv(g: MultiGraph, bc_pairs, params: RcParams, v: int) -> tuple[float, list]:
    """Exact TV distances between the laws of omega(E_v) under each (xi, tau) pair.

    Returns the maximum and the per-pair list.
    """
    if g.m > MAX_INFLUENCE_EDGES:
        raise TooLargeError(f"ball has {g.m} edges; exact influence supports at most {MAX_INFLUENCE_EDGES}")
    ev = center_edges(g, v)
    cache: dict = {}

    def marginal(bc):
        if bc not in cache:
            cache[bc] = exact_rc_distribution(g, bc, params).marginal_on(ev)
        return cache[bc]

    tvs = [0.5 * float(np.abs(marginal(a) - marginal(b)).sum()) for a, b in bc_pairs]
    return (max(tvs) if tvs else 0.0), tvs


def influence_decay_exact(g: MultiGraph, v: int, radii: Sequence[int], params: RcParams,
                          K: int = 4) -> InfluenceReport:
    """Max TV on omega(E_v) over all pairs of K-sparse partitions of the ball boundary, per radius."""
    maxes, counts = [], []
    for R in radii:
        b = ball(g, v, R)
        bg = b.graph
        if bg.m > MAX_INFLUENCE_EDGES:
            raise TooLargeError(f"B_{R}({v}) has {bg.m} edges; at most {MAX_INFLUENCE_EDGES} supported")
        bnd = [b.to_local(w) for w in b.boundary]
        parts = list(dict.fromkeys(sparse_partitions(bg.n, bnd, K)))
        ev = center_edges(bg, 0)
        marg = np.array([exact_rc_distribution(bg, bc, params).marginal_on(ev) for bc in parts])
        diff = 0.5 * np.abs(marg[:, None, :] - marg[None, :, :]).sum(axis=2)
        maxes.append(float(diff.max()))
        counts.append(len(parts) * (len(parts) - 1) // 2)
    slope = math.nan
    pos = [(r, x) for r, x in zip(radii, maxes) if x > 0]
    if len(pos) >= 2:
        r = np.array([a for a, _ in pos], dtype=float)
        y = np.log([b for _, b in pos])
        slope = float(np.polyfit(r, y, 1)[0])
    return InfluenceReport(int(v), int(K), params.p, params.q, list(radii), maxes, counts,
                           slope, math.exp(slope) if math.isfinite(slope) else math.nan)


# ---------------------------------------------------------------------------
# coupling-time scaling


@dataclass
class LogFit:
    slope: float
    intercept: float
    r2: float
    residuals: list


def fit_against_log(ns, values) -> LogFit:
    """Least squares values ~ a log n + b."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.asarray(values, dtype=float)
    if len(x) < 2:
        raise InvalidInputError("a fit needs at least two points")
    a, b = np.polyfit(x, y, 1)
    res = y - (a * x + b)
    sst = float(np.sum((y - y.mean()) ** 2))
    ssr = float(np.sum(res**2))
    # constant data is fitted exactly; ssr is then pure rounding
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    return LogFit(float(a), float(b), r2, res.tolist())


@dataclass
class ScalingRow:
    n: int
    median: float
    iqr: float
    times: list
    timeouts: int


@dataclass
class ScalingReport(_Report):
    family: str
    gamma: float
    p: float
    q: float
    t_max: float
    rows: list
    fit: LogFit | None

    def table(self):
        return (["n", "median_coupling_time", "iqr"],
                [[r.n, _fmt(r.median), _fmt(r.iqr)] for r in self.rows])


def _fmt(x: float) -> str:
    return f"{x:.10g}" if math.isfinite(x) else "inf"


def mixing_scaling(ns: Sequence[int], family: GraphFamily, params: RcParams, seeds: int,
                   t_max: float, seed=0, margin: float = 0.0, threads: int = 1) -> ScalingReport:
    """Median coupling time of X^1 and X^0 per n, and a fit of the medians against log n.

    A fresh graph is drawn from the family for every (n, seed).  Timeouts count
    as +inf in the medians and are reported per row.
    """
    if family.kind != "single-edge" and params.p >= p_u(params.q, family.gamma) - margin:
        raise InvalidInputError("p must lie below p_u(q, gamma) minus the margin")
    rows = []
    for n in ns:
        def one(i, n=n):
            g = family.sample(n, (seed, "family", n, i))
            return coupling_time(g, None, params, (seed, "couple", n, i), t_max)

        times = _map(one, range(seeds), threads)
        arr = np.asarray(times, dtype=float)
        q1, med, q3 = np.percentile(arr, [25, 50, 75]) if np.all(np.isfinite(arr)) else (
            np.quantile(np.sort(arr), [0.25, 0.5, 0.75], method="nearest"))
        rows.append(ScalingRow(int(n), float(med), float(q3 - q1) if math.isfinite(q3) else math.inf,
                               arr.tolist(), int(np.sum(~np.isfinite(arr)))))
    finite = [(r.n, r.median) for r in rows if math.isfinite(r.median)]
    fit = fit_against_log(*zip(*finite)) if len(finite) >= 2 else None
    return ScalingReport(family.kind, family.gamma, params.p, params.q, float(t_max), rows, fit)


# ---------------------------------------------------------------------------
# Potts bottleneck


@dataclass
class BottleneckReport(_Report):
    v_star: int
    d_star: int
    eps: float
    gap: int
    n: int
    beta: float
    q: int
    step_cap: int
    steps: list             # steps to the first exit (cap if censored)
    censored: list
    exact_phi: float | None = None
    exact_exit_rate: float | None = None     # Q(A, A^c) / mu(A)
    mu_A: float | None = None

    @property
    def sweeps(self) -> np.ndarray:
        return np.asarray(self.steps, dtype=float) / self.n

    @property
    def uncensored_fraction(self) -> float:
        return 1.0 - float(np.mean(self.censored)) if self.censored else 0.0

    def median_sweeps(self) -> float | None:
        """Median escape time in sweeps, or None when more than 20% are censored."""
        if self.uncensored_fraction < 0.8:
            return None
        return float(np.median(self.sweeps))

    def table(self):
        return (["seed_index", "steps", "sweeps", "censored"],
                [[i, s, f"{s / self.n:.10g}", int(c)] for i, (s, c) in enumerate(zip(self.steps, self.censored))])


def _neighbour_degree(g: MultiGraph, v: int) -> int:
    return int(np.sum(g.neighbors(v) != v))


def in_bottleneck(chain: PottsChain, v_star: int, gap: int) -> bool:
    return bool(_kernels._in_bottleneck(chain.spins, chain.counts, v_star, gap))


def bottleneck_escape(g: MultiGraph, beta: float, q: int, v_star: int, eps: float, seeds: int,
                      step_cap: int, seed=0, exact: bool | None = None,
                      threads: int = 1) -> BottleneckReport:
    """Discrete Glauber escape times from A = {spin(v*) = 0, m_0 - max_j m_j >= floor(eps d*)}.

    Each run colours v*'s connected component with spin 0 and every other vertex
    uniformly.  Runs still inside A after ``step_cap`` steps are censored.
    """
    q = int(q)
    if q < 2:
        raise InvalidInputError("q must be an integer >= 2")
    if not 0 < eps < 1:
        raise InvalidInputError("bottleneck_eps must lie in (0, 1)")
    if not 0 <= v_star < g.n:
        raise InvalidInputError("v_star out of range")
    d = _neighbour_degree(g, v_star)
    gap = int(math.floor(eps * d))
    comp = component_labels(g, np.ones(g.m, dtype=bool))
    in_comp = comp == comp[v_star]

    def one(i):
        rng = stream(seed, "bottleneck-init", i)
        sigma = rng.integers(q, size=g.n)
        sigma[in_comp] = 0
        chain = PottsChain(g, beta, q, sigma)
        if not in_bottleneck(chain, v_star, gap):
            raise InvalidInputError("initial state lies outside the bottleneck set")
        draws = stream(seed, "bottleneck-glauber", i)
        done = 0
        while done < step_cap:
            c = min(CHUNK, step_cap - done)
            verts = draws.integers(g.n, size=c)
            us = draws.random(c)
            k = _kernels.potts_escape(g.indptr, g.nbr, chain.spins, chain.counts, chain.beta, q,
                                      verts, us, v_star, gap)
            if k >= 0:
                return done + k + 1, False
            done += c
        return step_cap, True

    res = _map(one, range(seeds), threads)
    report = BottleneckReport(int(v_star), d, float(eps), gap, g.n, float(beta), q, int(step_cap),
                              [r[0] for r in res], [r[1] for r in res])
    if exact is None:
        exact = q**g.n <= MAX_CONDUCTANCE_STATES
    if exact:
        phi, rate, mu_a = exact_conductance(g, beta, q, v_star, gap)
        report.exact_phi, report.exact_exit_rate, report.mu_A = phi, rate, mu_a
    return report


def _all_counts(g: MultiGraph, spins: np.ndarray, q: int) -> np.ndarray:
    """counts[state, v, i]: neighbours of v with spin i (self-loops ignored)."""
    N, n = spins.shape
    out = np.zeros((N, n, q), dtype=np.int64)
    for a, b in g.edges.tolist():
        if a == b:
            continue
        out[np.arange(N), a, spins[:, b]] += 1
        out[np.arange(N), b, spins[:, a]] += 1
    return out


def exact_conductance(g: MultiGraph, beta: float, q: int, v_star: int, gap: int):
    """Exact Phi(A) = Q(A, A^c) / (mu(A) mu(A^c)) for single-site Glauber.

    Returns (Phi, Q/mu(A), mu(A)).
    """
    if q**g.n > MAX_CONDUCTANCE_STATES:
        raise TooLargeError(f"{q}^{g.n} states exceed {MAX_CONDUCTANCE_STATES}")
    dist = exact_potts_distribution(g, beta, q, max_states=MAX_CONDUCTANCE_STATES)
    S = dist.spins
    mu = dist.probabilities
    n = g.n
    cnt = _all_counts(g, S, q)
    cv = cnt[:, v_star, :]
    others = cv[:, 1:].max(axis=1) if q > 1 else np.zeros(len(S), dtype=np.int64)
    in_a = (S[:, v_star] == 0) & (cv[:, 0] - others >= gap)
    mu_a = float(mu[in_a].sum())
    if mu_a <= 0 or mu_a >= 1:
        raise InvalidInputError("bottleneck set is empty or everything")
    codes = np.arange(len(S), dtype=np.int64)
    flow = 0.0
    idx = np.flatnonzero(in_a)
    for v in range(n):
        c = cnt[idx, v, :].astype(float)
        w = np.exp(beta * (c - c.max(axis=1, keepdims=True)))
        cond = w / w.sum(axis=1, keepdims=True)
        for s in range(q):
            move = S[idx, v] != s
            target = codes[idx] + (s - S[idx, v]) * q**v
            leave = move & ~in_a[target]
            flow += float(np.sum(mu[idx][leave] * cond[leave, s])) / n
    phi = flow / (mu_a * (1.0 - mu_a))
    return phi, flow / mu_a, mu_a


def planted_graph(n: int, base: int, d_star: int, seed, simple: bool = True) -> MultiGraph:
    """Configuration-model graph with one vertex (0) of degree d_star and the rest of degree base."""
    dn = planted_degree_sequence(n, base, d_star)
    if simple:
        return sample_simple_graph(dn, seed)
    return sample_configuration_model(dn, seed)


__all__ = [
    "BottleneckReport", "GraphFamily", "InfluenceReport", "LogFit", "ScalingReport",
    "ShatterReport", "SparseCheck", "all_balls", "bottleneck_escape", "center_edges",
    "exact_conductance", "fit_against_log", "in_bottleneck",
    "influence_decay_exact", "influence_tv", "kr_sparse_check", "mixing_scaling",
    "planted_graph", "shatter_stats",
]
