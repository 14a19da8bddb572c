import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fkmixer.dynamics import (FkChain, GrandCoupling, PottsChain, coupling_schedule, coupling_time,
                              fk_run_continuous, fk_update, potts_glauber_step, sw_step)
from fkmixer.errors import InvalidInputError
from fkmixer.graphs import MultiGraph, complete_graph, path_graph, sample_er_poisson_cloning, star_graph
from fkmixer.rc_core import BoundaryPartition, RcParams, exact_potts_distribution, exact_rc_distribution
from fkmixer.rng import stream
from fkmixer.validation import SMALL_GRAPHS

EDGE = MultiGraph(2, [(0, 1)])


def tv(a, b):
    return 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())


def test_update_thresholds():
    par = RcParams(0.4, 1)
    ch = FkChain(complete_graph(3), par, omega=np.zeros(3, bool))
    assert ch.threshold(0) == 0.4
    par = RcParams(0.5, 2)
    ch = FkChain(EDGE, par)
    assert ch.threshold(0) == par.phat
    fk_update(ch, 0, 0.3)
    assert ch.config[0] and ch.threshold(0) == par.phat
    fk_update(ch, 0, 0.34)
    assert not ch.config[0]
    ch = FkChain(complete_graph(3), par, omega=np.ones(3, bool))
    assert ch.threshold(1) == 0.5
    with pytest.raises(InvalidInputError):
        fk_update(ch, 0, 1.5)


@pytest.mark.parametrize("backend", ["naive", "hdt", "search"])
def test_run_trivial(backend):
    g = sample_er_poisson_cloning(30, 2.0, 0)
    omega = np.arange(g.m) % 2 == 0
    ch = FkChain(g, RcParams(0.5, 2), omega=omega, backend=backend)
    fk_run_continuous(ch, 0.0, 1)
    assert np.array_equal(ch.config, omega)
    empty = FkChain(MultiGraph(4, []), RcParams(0.5, 2), backend=backend)
    empty.run_continuous(10.0, 1)
    assert empty.config.shape == (0,)
    with pytest.raises(InvalidInputError):
        ch.run_continuous(-1.0, 0)


def test_single_edge_marginal():
    par = RcParams(0.5, 2)
    reps = 100_000
    ch = FkChain(EDGE, par)
    opened = 0
    for s in range(reps):
        ch.oracle.set_edge(0, True)
        ch.run_continuous(50.0, s)
        opened += ch.config[0]
    assert abs(opened / reps - 1 / 3) <= 0.005


@pytest.mark.parametrize("backend", ["naive", "hdt"])
def test_backends_give_same_trajectory(backend):
    g = sample_er_poisson_cloning(60, 2.0, 4)
    par = RcParams(0.45, 2.5)
    bc = BoundaryPartition(g.n, [(0, 5, 7)])
    a = FkChain(g, par, bc, np.ones(g.m, bool), "search").run_continuous(5.0, 9, record=True)
    b = FkChain(g, par, bc, np.ones(g.m, bool), backend).run_continuous(5.0, 9, record=True)
    assert np.array_equal(a.edges, b.edges) and np.array_equal(a.states, b.states)
    assert np.array_equal(a.times, b.times)


def test_trajectory_determinism_and_threads(tmp_path):
    g = sample_er_poisson_cloning(200, 2.0, 1)
    par = RcParams(0.4, 2)

    def go(seed):
        ch = FkChain(g, par, omega=np.ones(g.m, bool))
        return ch.run_continuous(3.0, seed, record=True)

    first = go(5)
    assert np.all(np.diff(first.times) >= 0)
    assert first.times[-1] <= 3.0
    with ThreadPoolExecutor(4) as ex:
        outs = list(ex.map(go, [5] * 8))
    for t in outs:
        assert np.array_equal(t.times, first.times) and np.array_equal(t.states, first.states)
    first.write_csv(tmp_path / "traj.csv")
    assert (tmp_path / "traj.csv").read_text().splitlines()[0] == "event_time,edge,new_state"


def test_discrete_continuous_identical():
    g = sample_er_poisson_cloning(300, 2.0, 2)
    par = RcParams(0.35, 2)
    for seed in range(3):
        a = FkChain(g, par, omega=np.ones(g.m, bool))
        a.run_continuous(40.0, seed)
        n = int(stream(seed, "fk-count").poisson(40.0 * g.m))
        b = FkChain(g, par, omega=np.ones(g.m, bool))
        b.run_discrete(n, seed)
        assert a.steps == b.steps == n
        assert np.array_equal(a.config, b.config)


CASES = [(p, q) for p in (0.3, 0.7) for q in (1, 1.5, 2, 3)]


@pytest.mark.parametrize("name", ["single-edge", "path-3", "triangle", "star-3", "triangle+pendant",
                                  "double-edge", "loop+edge"])
def test_stationarity_small_graphs(name):
    g = SMALL_GRAPHS[name]
    worst = 0.0
    for wired in (False, True):
        bc = BoundaryPartition(g.n, [(0, g.n - 1)]) if wired else BoundaryPartition(g.n)
        for p, q in CASES:
            par = RcParams(p, q)
            ch = FkChain(g, par, bc, np.ones(g.m, bool))
            masks = ch.sample_masks(50.0, 40_000, 1.0, (7, name, p, q, wired))
            emp = np.bincount(masks, minlength=1 << g.m) / len(masks)
            worst = max(worst, tv(emp, exact_rc_distribution(g, bc, par).probabilities))
    assert worst <= 0.02


def test_coupling_time_examples():
    par = RcParams(0.5, 2)
    assert coupling_time(MultiGraph(3, []), None, par, 0, 10.0) == 0.0
    for seed in range(20):
        times, _, _ = next(coupling_schedule(seed, 1, 100.0))
        assert coupling_time(EDGE, None, par, seed, 100.0) == times[0]
    assert coupling_time(sample_er_poisson_cloning(200, 2, 0), None, RcParams(0.9, 2), 0, 1e-3) == math.inf
    with pytest.raises(InvalidInputError):
        GrandCoupling(EDGE, RcParams(0.5, 0.5))


def test_coupling_fast_path_matches_interpreted():
    g = sample_er_poisson_cloning(80, 2.0, 6)
    par = RcParams(0.4, 2)
    for seed in range(10):
        fast = GrandCoupling(g, par).run(seed, 200.0)
        slow = GrandCoupling(g, par).run(seed, 200.0, on_event=lambda c: None)
        assert fast == slow


def test_coupled_state_is_stationary():
    g = complete_graph(3)
    par = RcParams(0.3, 2)
    counts = np.zeros(8)
    ctimes = []
    for seed in range(10_000):
        gc = GrandCoupling(g, par)
        for times, edges, us in coupling_schedule(seed, g.m, 100.0):
            for t, e, u in zip(times.tolist(), edges.tolist(), us.tolist()):
                gc.step(e, u, t)
                if gc.discrepancy() == 0 and len(ctimes) <= seed:
                    ctimes.append(t)
        top, bottom = gc.configs()
        assert np.array_equal(top, bottom)
        counts[int(sum(1 << i for i in np.flatnonzero(top)))] += 1
    assert np.isfinite(np.mean(ctimes)) and len(ctimes) == 10_000
    assert tv(counts / counts.sum(), exact_rc_distribution(g, None, par).probabilities) <= 0.02


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 50), st.floats(0.5, 3.0), st.floats(0.05, 0.95), st.floats(1.0, 4.0),
       st.integers(0, 2**31))
def test_grand_coupling_monotone(n, lam, p, q, seed):
    g = sample_er_poisson_cloning(n, lam, seed)
    if g.m == 0:
        return
    rng = stream(seed, "test", "starts")
    lo = rng.random(g.m) < 0.3
    hi = lo | (rng.random(g.m) < 0.5)
    gc = GrandCoupling(g, RcParams(p, q), starts=[np.ones(g.m, bool), hi, lo, np.zeros(g.m, bool)])

    def check(c):
        cs = c.configs()
        for a, b in zip(cs, cs[1:]):
            assert np.all(b <= a)

    gc.run(seed, 30.0, on_event=check)


def test_grand_coupling_monotone_many_seeds():
    for seed in range(1000):
        rng = stream(seed, "test", "mono")
        g = sample_er_poisson_cloning(int(rng.integers(2, 51)), 2.0, seed)
        if g.m == 0:
            continue
        gc = GrandCoupling(g, RcParams(float(rng.uniform(0.1, 0.9)), float(rng.uniform(1, 4))))
        violations = []
        gc.run(seed, 20.0, on_event=lambda c: violations.append(bool(np.any(c.members[1] > c.members[0]))))
        assert not any(violations)


def test_potts_step_examples():
    chain = PottsChain(MultiGraph(1, []), 1.5, 3)
    assert np.allclose(chain.conditional(0), 1 / 3)
    chain = PottsChain(star_graph(3), 0.0, 2, [1, 0, 0, 0])
    assert np.allclose(chain.conditional(0), 0.5)
    chain = PottsChain(star_graph(3), math.log(2), 2, [1, 0, 0, 0])
    assert chain.conditional(0)[0] == pytest.approx(8 / 9)
    potts_glauber_step(chain, 0, 0.88)
    assert chain.spins[0] == 0
    potts_glauber_step(chain, 0, 0.9)
    assert chain.spins[0] == 1
    with pytest.raises(InvalidInputError):
        potts_glauber_step(chain, 0, -0.1)
    with pytest.raises(InvalidInputError):
        PottsChain(star_graph(3), 1.0, 2, [2, 0, 0, 0])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.floats(0.0, 3.0), st.integers(2, 5), st.integers(0, 2**31))
def test_potts_counts_consistent(n, beta, q, seed):
    g = sample_er_poisson_cloning(n, 2.5, seed)
    rng = stream(seed, "test", "potts")
    chain = PottsChain(g, beta, q, rng.integers(q, size=n))
    chain.run(500, seed)
    assert chain.counts_consistent()
    for v, u in zip(rng.integers(n, size=50), rng.random(50)):
        chain.step(int(v), float(u))
    assert chain.counts_consistent()
    sw_step(chain, seed)
    assert chain.counts_consistent()


def test_potts_glauber_stationary():
    g = MultiGraph(3, [(0, 1), (1, 2), (2, 0), (0, 0)])
    beta, q = 0.7, 3
    chain = PottsChain(g, beta, q)
    rng = stream(0, "test", "potts-law")
    counts = np.zeros(q**g.n)
    for k in range(300_000):
        chain.step(int(rng.integers(g.n)), float(rng.random()))
        if k % 3 == 2:
            counts[int(sum(int(s) * q**v for v, s in enumerate(chain.spins)))] += 1
    assert tv(counts / counts.sum(), exact_potts_distribution(g, beta, q).probabilities) <= 0.02


def test_potts_sampled_agreements_chain_across_chunks():
    g = path_graph(5)
    a = PottsChain(g, 0.5, 2).edge_agreements(200_000, 7, 3)
    assert a.shape == (4,)
    assert np.all((a > 0.4) & (a < 0.8))


def test_sw_examples():
    g = path_graph(4)
    chain = PottsChain(g, 0.0, 3)
    draws = []
    for s in range(3000):
        chain.spins[:] = 0
        chain.recount()
        sw_step(chain, s)
        draws.append(chain.spins.copy())
    draws = np.array(draws)
    assert abs(np.mean(draws[:, 0] == draws[:, 1]) - 1 / 3) < 0.04
    chain = PottsChain(g, 60.0, 3, [2, 2, 2, 2])
    for s in range(20):
        sw_step(chain, s)
        assert len(set(chain.spins.tolist())) == 1


def test_sw_single_edge_preserves_stationarity():
    beta, reps = 0.9, 100_000
    law = exact_potts_distribution(EDGE, beta, 2).probabilities
    starts = stream(0, "test", "sw-starts").choice(4, size=reps, p=law)
    chain = PottsChain(EDGE, beta, 2)
    counts = np.zeros(4)
    for s, code in enumerate(starts.tolist()):
        chain.spins[:] = [code % 2, code // 2]
        chain.recount()
        sw_step(chain, s)
        counts[chain.spins[0] + 2 * chain.spins[1]] += 1
    assert tv(counts / reps, law) <= 0.01


@pytest.mark.parametrize("start,agree", [([0, 0], None), ([0, 1], 0.5)])
def test_sw_single_edge_kernel(start, agree):
    # an agreeing edge opens w.p. p and the clusters are recoloured uniformly
    beta, reps = 0.9, 20_000
    p = 1 - math.exp(-beta)
    expected = (1 + p) / 2 if agree is None else agree
    chain = PottsChain(EDGE, beta, 2, start)
    hits = 0
    for s in range(reps):
        chain.spins[:] = start
        chain.recount()
        sw_step(chain, s)
        hits += chain.spins[0] == chain.spins[1]
    assert abs(hits / reps - expected) <= 4 * math.sqrt(0.25 / reps)
