"""FK Glauber dynamics, the grand monotone coupling, Potts Glauber and Swendsen-Wang.

Continuous time is realized as N ~ Poisson(t|E|) events, each at a uniform edge
with a fresh uniform.  Discrete and continuous runs draw edges and uniforms from
the same named stream in the same chunk layout, so ``run_discrete(N)`` with the
count drawn by ``run_continuous`` reproduces it bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .connectivity import ConnectivityOracle, SearchOracle, SearchWorkspace, new_oracle
from .errors import InvalidInputError
from .graphs import MultiGraph
from .rc_core import BoundaryPartition, RcParams
from .rng import stream

CHUNK = 1 << 16


def _event_chunks(rng: np.random.Generator, m: int, total: int):
    """Yield (edges, uniforms) blocks; the layout depends only on ``total``."""
    done = 0
    while done < total:
        c = min(CHUNK, total - done)
        edges = rng.integers(m, size=c)
        us = rng.random(c)
        yield edges, us
        done += c


def _sorted_times(rng: np.random.Generator, total: int, t: float):
    """Yield the order statistics of ``total`` uniforms on [0, t], ascending, in blocks.

    Uses log(1 - U_(k)) = sum_{j<=k} log(V_j) / (total - j + 1).
    """
    carry = 0.0
    done = 0
    while done < total:
        c = min(CHUNK, total - done)
        remaining = total - done - np.arange(c)
        logs = carry + np.cumsum(np.log(rng.random(c)) / remaining)
        carry = float(logs[-1])
        yield -np.expm1(logs) * t
        done += c


@dataclass
class Trajectory:
    """Every update event of a run: time, edge and the edge's state afterwards."""

    times: np.ndarray
    edges: np.ndarray
    states: np.ndarray

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("event_time,edge,new_state\n")
            for t, e, s in zip(self.times.tolist(), self.edges.tolist(), self.states.tolist()):
                fh.write(f"{t:.17g},{e},{int(s)}\n")


class FkChain:
    """FK Glauber dynamics for one configuration.

    The chain owns its connectivity oracle.  With the default ``search``
    backend, runs go through compiled kernels that share the oracle's arrays;
    other backends run the same updates in Python.
    """

    def __init__(self, g: MultiGraph, params: RcParams, bc: BoundaryPartition | None = None,
                 omega=None, backend: str = "search"):
        self.graph = g
        self.params = params
        self.bc = bc if bc is not None else BoundaryPartition.free(g.n)
        self.oracle: ConnectivityOracle = new_oracle(g, self.bc, omega, backend)
        self.time = 0.0
        self.steps = 0

    @property
    def config(self) -> np.ndarray:
        return self.oracle.config()

    @property
    def _compiled(self) -> bool:
        return isinstance(self.oracle, SearchOracle)

    def threshold(self, e: int) -> float:
        p = self.params.p
        return self.params.phat if self.oracle.is_cut_edge(e) else p

    def update(self, e: int, u: float) -> None:
        self.oracle.set_edge(e, u <= self.threshold(e))
        self.steps += 1

    # -- event blocks

    def _apply(self, edges, us, states=None):
        o = self.oracle
        if self._compiled:
            ws = o.ws
            p, phat = self.params.p, self.params.phat
            if states is None:
                _kernels.fk_run_events(ws.indptr, ws.nbr, ws.inc, ws.eu, ws.ev, o.open_,
                                       edges, us, p, phat, ws.mark, ws.side, ws.qa, ws.qb, ws.stamp)
            else:
                _kernels.fk_run_recorded(ws.indptr, ws.nbr, ws.inc, ws.eu, ws.ev, o.open_,
                                         edges, us, p, phat, states,
                                         ws.mark, ws.side, ws.qa, ws.qb, ws.stamp)
            o.state[:] = o.open_[:self.graph.m]
            o.ops += 2 * len(edges)
        else:
            for k, (e, u) in enumerate(zip(edges.tolist(), us.tolist())):
                o.set_edge(e, u <= self.threshold(e))
                if states is not None:
                    states[k] = o.state[e]
        self.steps += len(edges)

    def run_discrete(self, steps: int, seed) -> Trajectory | None:
        """Apply ``steps`` single-edge updates drawn from ``seed``."""
        return self._run_events(int(steps), seed, None)

    def run_continuous(self, t: float, seed, record: bool = False) -> Trajectory | None:
        """Run for continuous time t (each edge carries a rate-1 clock)."""
        if t < 0:
            raise InvalidInputError("time must be non-negative")
        m = self.graph.m
        total = int(stream(seed, "fk-count").poisson(t * m)) if m else 0
        traj = self._run_events(total, seed, (t, record))
        self.time += t
        return traj

    def _run_events(self, total, seed, timing):
        if total < 0:
            raise InvalidInputError("step count must be non-negative")
        m = self.graph.m
        if m == 0 or total == 0:
            return None
        record = timing is not None and timing[1]
        rng = stream(seed, "fk-events")
        times = _sorted_times(stream(seed, "fk-times"), total, timing[0]) if record else None
        out = [] if record else None
        for edges, us in _event_chunks(rng, m, total):
            states = np.empty(len(edges), dtype=np.bool_) if record else None
            self._apply(edges, us, states)
            if record:
                out.append((next(times) + self.time, edges, states))
        if record:
            return Trajectory(np.concatenate([o[0] for o in out]),
                              np.concatenate([o[1] for o in out]),
                              np.concatenate([o[2] for o in out]))
        return None

    def sample_masks(self, burn_in: float, n_samples: int, spacing: float, seed) -> np.ndarray:
        """Run continuously, recording the open-edge bitmask at burn_in + k*spacing."""
        m = self.graph.m
        if m > 62:
            raise InvalidInputError("bitmask sampling needs at most 62 edges")
        span = burn_in + (n_samples - 1) * spacing
        sample_times = burn_in + spacing * np.arange(n_samples, dtype=float)
        out = np.zeros(n_samples, dtype=np.int64)
        total = int(stream(seed, "fk-count").poisson(span * m)) if m else 0
        rng = stream(seed, "fk-events")
        times = _sorted_times(stream(seed, "fk-times"), total, span)
        j = 0
        o = self.oracle
        for edges, us in _event_chunks(rng, m, total):
            ts = next(times)
            if self._compiled:
                ws = o.ws
                j += _kernels.fk_run_sampled(ws.indptr, ws.nbr, ws.inc, ws.eu, ws.ev, o.open_,
                                             ts, edges, us, self.params.p, self.params.phat,
                                             sample_times[j:], out, j,
                                             ws.mark, ws.side, ws.qa, ws.qb, ws.stamp)
                o.state[:] = o.open_[:m]
                self.steps += len(edges)
            else:
                for t_ev, e, u in zip(ts.tolist(), edges.tolist(), us.tolist()):
                    while j < n_samples and sample_times[j] < t_ev:
                        out[j] = _mask(o.state)
                        j += 1
                    self.update(e, u)
        out[j:] = _mask(o.state)
        self.time += span
        return out


def _mask(state) -> int:
    return int(np.sum(np.left_shift(1, np.flatnonzero(state)), dtype=np.int64))


def fk_update(chain: FkChain, e: int, u: float) -> None:
    """Open e iff u <= phat when e is a cut-edge, u <= p otherwise."""
    if not 0.0 <= u <= 1.0:
        raise InvalidInputError("u must lie in [0, 1]")
    chain.update(e, u)


def fk_run_continuous(chain: FkChain, t: float, seed, record: bool = False):
    return chain.run_continuous(t, seed, record)


# ---------------------------------------------------------------------------
# grand coupling


def coupling_schedule(seed, m: int, t_max: float):
    """Shared (times, edges, uniforms) blocks: rate-|E| arrivals up to t_max."""
    rng = stream(seed, "coupling-schedule")
    t0 = 0.0
    while t0 <= t_max:
        gaps = rng.exponential(1.0 / m, size=CHUNK)
        edges = rng.integers(m, size=CHUNK)
        us = rng.random(CHUNK)
        times = t0 + np.cumsum(gaps)
        keep = int(np.searchsorted(times, t_max, side="right"))
        yield times[:keep], edges[:keep], us[:keep]
        if keep < CHUNK:
            return
        t0 = float(times[-1])


class GrandCoupling:
    """Several FK chains driven by one schedule of (time, edge, uniform) triples.

    Every member sees the same edge and uniform at each event; only its own
    cut-edge status decides the threshold.  For q >= 1 the order of the
    starting configurations is preserved.
    """

    def __init__(self, g: MultiGraph, params: RcParams, bc: BoundaryPartition | None = None,
                 starts=None):
        if params.q < 1:
            raise InvalidInputError("the monotone coupling needs q >= 1")
        self.graph = g
        self.params = params
        self.bc = bc if bc is not None else BoundaryPartition.free(g.n)
        if self.bc.universe != g.n:
            raise InvalidInputError("boundary partition universe must match the graph")
        if starts is None:
            starts = [np.ones(g.m, dtype=bool), np.zeros(g.m, dtype=bool)]
        self.ws = SearchWorkspace(g, self.bc.merge_pairs())
        self.members = [self.ws.open_array(np.asarray(w, dtype=bool)) for w in starts]
        self.time = 0.0
        self.events = 0

    def configs(self) -> list[np.ndarray]:
        m = self.graph.m
        return [x[:m].copy() for x in self.members]

    def discrepancy(self) -> int:
        m = self.graph.m
        first = self.members[0][:m]
        diff = np.zeros(m, dtype=bool)
        for x in self.members[1:]:
            diff |= x[:m] != first
        return int(diff.sum())

    def step(self, e: int, u: float, t: float | None = None) -> None:
        ws = self.ws
        p, phat = self.params.p, self.params.phat
        for x in self.members:
            thr = _kernels._fk_threshold(ws.indptr, ws.nbr, ws.inc, ws.eu, ws.ev, x, e, p, phat,
                                         ws.mark, ws.side, ws.qa, ws.qb, ws.stamp)
            x[e] = u <= thr
        self.events += 1
        if t is not None:
            self.time = t

    def run(self, seed, t_max: float, on_event=None) -> float:
        """Advance on the seeded schedule until coalescence or t_max.

        Returns the time of the event after which all members agree (0 if they
        already do), or ``math.inf`` on timeout.  ``on_event(coupling)`` is
        called after every event and forces the interpreted path.
        """
        m = self.graph.m
        disc = self.discrepancy()
        if disc == 0:
            return self.time
        fast = on_event is None and len(self.members) == 2
        counter = np.array([disc], dtype=np.int64)
        ws = self.ws
        for times, edges, us in coupling_schedule(seed, m, t_max):
            if fast:
                top, bot = self.members
                k = _kernels.fk_coupled_events(ws.indptr, ws.nbr, ws.inc, ws.eu, ws.ev, top, bot,
                                               edges, us, self.params.p, self.params.phat,
                                               counter, ws.mark, ws.side, ws.qa, ws.qb, ws.stamp)
                if k >= 0:
                    self.events += k + 1
                    self.time = float(times[k])
                    return self.time
                self.events += len(edges)
            else:
                for t, e, u in zip(times.tolist(), edges.tolist(), us.tolist()):
                    self.step(e, u, t)
                    if on_event is not None:
                        on_event(self)
                    if self.discrepancy() == 0:
                        return self.time
        self.time = t_max
        return math.inf


def coupling_time(g: MultiGraph, bc: BoundaryPartition | None, params: RcParams, seed,
                  t_max: float) -> float:
    """First event time at which the all-open and all-closed chains agree; inf on timeout."""
    if t_max <= 0:
        raise InvalidInputError("t_max must be positive")
    if g.m == 0:
        return 0.0
    return GrandCoupling(g, params, bc).run(seed, t_max)


# ---------------------------------------------------------------------------
# Potts


class PottsChain:
    """Potts Glauber dynamics with spins 0..q-1 and cached neighbour spin counts.

    ``counts[v, i]`` is the number of neighbours of v with spin i; self-loops
    are ignored.
    """

    def __init__(self, g: MultiGraph, beta: float, q: int, sigma=None):
        q = int(q)
        if q < 2:
            raise InvalidInputError("Potts dynamics needs integer q >= 2")
        if beta < 0:
            raise InvalidInputError("beta must be non-negative")
        self.graph = g
        self.beta = float(beta)
        self.q = q
        if sigma is None:
            sigma = np.zeros(g.n, dtype=np.int64)
        sigma = np.array(sigma, dtype=np.int64)
        if sigma.shape != (g.n,) or (sigma.size and (sigma.min() < 0 or sigma.max() >= q)):
            raise InvalidInputError("spins must be one value in 0..q-1 per vertex")
        self.spins = sigma
        self.steps = 0
        self._weights = np.empty(q)
        self.recount()

    def recount(self) -> None:
        g = self.graph
        self.counts = _kernels.potts_counts(g.indptr, g.nbr, g.inc, g.edges[:, 0], g.edges[:, 1],
                                            self.spins, self.q)

    def counts_consistent(self) -> bool:
        g = self.graph
        fresh = _kernels.potts_counts(g.indptr, g.nbr, g.inc, g.edges[:, 0], g.edges[:, 1],
                                      self.spins, self.q)
        return bool(np.array_equal(fresh, self.counts))

    def conditional(self, v: int) -> np.ndarray:
        c = self.counts[v].astype(float)
        w = np.exp(self.beta * (c - c.max()))
        return w / w.sum()

    def step(self, v: int, u: float) -> None:
        g = self.graph
        _kernels._potts_resample(g.indptr, g.nbr, self.spins, self.counts, self.beta, self.q,
                                 int(v), float(u), self._weights)
        self.steps += 1

    def _draws(self, steps: int, seed):
        rng = stream(seed, "potts-glauber")
        done = 0
        while done < steps:
            c = min(CHUNK, steps - done)
            verts = rng.integers(self.graph.n, size=c)
            us = rng.random(c)
            yield verts, us
            done += c

    def run(self, steps: int, seed) -> None:
        g = self.graph
        if g.n == 0:
            return
        for verts, us in self._draws(int(steps), seed):
            _kernels.potts_run(g.indptr, g.nbr, self.spins, self.counts, self.beta, self.q, verts, us)
        self.steps += int(steps)

    def edge_agreements(self, steps: int, every: int, seed, edge_ids=None) -> np.ndarray:
        """Run ``steps`` updates; return per-edge agreement frequencies sampled every ``every`` steps."""
        g = self.graph
        ids = np.arange(g.m) if edge_ids is None else np.asarray(edge_ids, dtype=np.int64)
        eu = np.ascontiguousarray(g.edges[ids, 0])
        ev = np.ascontiguousarray(g.edges[ids, 1])
        agree = np.zeros(len(ids), dtype=np.int64)
        taken = done = 0
        if every < 1:
            raise InvalidInputError("sampling interval must be >= 1")
        for verts, us in self._draws(int(steps), seed):
            taken += _kernels.potts_run_sampled(g.indptr, g.nbr, self.spins, self.counts, self.beta,
                                                self.q, verts, us, every, done, eu, ev, agree)
            done += len(verts)
        self.steps += int(steps)
        return agree / max(taken, 1)


def potts_glauber_step(chain: PottsChain, v: int, u: float) -> None:
    """Resample spin v from its conditional law by inverse CDF on u."""
    if not 0.0 <= u <= 1.0:
        raise InvalidInputError("u must lie in [0, 1]")
    chain.step(v, u)


def sw_step(chain: PottsChain, seed) -> None:
    """One Swendsen-Wang move: percolate monochromatic edges, recolor clusters uniformly."""
    g = chain.graph
    rng = stream(seed, "swendsen-wang")
    p = -math.expm1(-chain.beta)
    u = rng.random(g.m)
    a, b = g.edges[:, 0], g.edges[:, 1]
    keep = (chain.spins[a] == chain.spins[b]) & (u < p)
    adj = coo_matrix((np.ones(int(keep.sum())), (a[keep], b[keep])), shape=(g.n, g.n))
    k, labels = connected_components(adj, directed=False)
    colors = rng.integers(chain.q, size=k)
    chain.spins = colors[labels].astype(np.int64)
    chain.recount()
    chain.steps += 1
