import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from fkmixer.errors import InvalidInputError
from fkmixer.rc_core import RcParams
from fkmixer.thresholds import (TreeSpec, beta_u, check_alternate_form, decay_fit, g_func,
                                gw_volume_tail, h_func, h_infimum, largest_g_exponent_slack, p_u,
                                regular_tree, regular_tree_phi, tree_from_offspring, tree_phi,
                                tree_phi_partition)

QS = [1, 1.5, 2, 3, 5]
GAMMAS = [1.5, 2, 3, 5]


def oracle_p_u(q, gamma):
    """Independent route: bounded scalar minimisation of h over y plus the y -> 1 limit."""
    def h(y):
        return (y - 1) * (y**gamma + q - 1) / (y**gamma - y)
    best = q / (gamma - 1)
    for lo, hi in [(1 + 1e-7, 2), (2, 20), (20, 1e3)]:
        r = minimize_scalar(h, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = min(best, r.fun)
    return best / (1 + best)


def test_g_examples():
    for p in (0.1, 0.5, 0.9):
        for q in (1, 2, 4):
            par = RcParams(p, q)
            assert g_func(1.0, par) == pytest.approx(1.0, abs=1e-15)
            x = 1.0 + 2e-6
            deriv = (g_func(x + 1e-6, par) - g_func(x - 1e-6, par)) / 2e-6
            assert abs(deriv - par.phat) <= 1e-5
            assert g_func(math.inf, par) == pytest.approx(1 / (1 - p))
    with pytest.raises(InvalidInputError):
        g_func(0.5, RcParams(0.5, 2))


def test_h_limit():
    for q, gamma in [(2, 2), (3, 1.5), (1, 4)]:
        assert abs(h_func(1 + 1e-8, q, gamma) - q / (gamma - 1)) <= 1e-5
    with pytest.raises(InvalidInputError):
        h_func(1.0, 2, 2)


def test_p_u_values():
    assert abs(p_u(1, 2) - 0.5) <= 1e-10
    assert abs(p_u(2, 2) - 2 / 3) <= 1e-10
    with pytest.raises(InvalidInputError):
        p_u(2, 1.0)


@pytest.mark.parametrize("q", [2.5, 3, 5, 10])
def test_p_u_closed_form_gamma2(q):
    # for gamma = 2, h(y) = (y^2 + q - 1) / y with minimum 2 sqrt(q-1) once q > 2
    inf_h = 2 * math.sqrt(q - 1)
    assert abs(p_u(q, 2) - inf_h / (1 + inf_h)) <= 1e-10


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("gamma", GAMMAS)
def test_p_u_against_oracle(q, gamma):
    assert abs(p_u(q, gamma) - oracle_p_u(q, gamma)) <= 1e-8
    assert p_u(q, gamma) <= q / (q + gamma - 1) + 1e-15
    assert beta_u(q, gamma) == pytest.approx(-math.log(1 - p_u(q, gamma)))


def test_p_u_monotone():
    for q in QS:
        vals = [p_u(q, g) for g in GAMMAS]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    for g in GAMMAS:
        vals = [p_u(q, g) for q in QS]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("gamma", GAMMAS)
def test_phat_below_inverse_gamma(q, gamma):
    pu = p_u(q, gamma)
    for p in np.linspace(0.01, pu, 21)[:-1]:
        assert RcParams(float(p), q).phat < 1 / gamma


def test_alternate_form_examples():
    assert check_alternate_form(0.5, 2, 2)
    assert not check_alternate_form(0.7, 2, 2)
    par = RcParams(0.4, 3)
    assert g_func(1.0, par) - 1 == 0.0


@pytest.mark.parametrize("q", [1, 2, 3, 5])
@pytest.mark.parametrize("gamma", [1.5, 2, 3])
def test_alternate_form_brackets_p_u(q, gamma):
    pu = p_u(q, gamma)
    assert check_alternate_form(pu - 1e-6, q, gamma)
    assert not check_alternate_form(pu + 1e-6, q, gamma)


@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("gamma", [1.5, 2, 3])
def test_g_exponent_slack(q, gamma):
    xs = np.geomspace(1 + 1e-6, 1e4, 300)
    for frac in (0.3, 0.6, 0.9):
        assert largest_g_exponent_slack(RcParams(frac * p_u(q, gamma), q), gamma, xs) > 0


def test_h_infimum_reports_location():
    assert h_infimum(2, 2).at_endpoint
    m = h_infimum(5, 2)
    assert not m.at_endpoint and m.argmin == pytest.approx(2.0, rel=1e-4)


def test_tree_phi_examples():
    par = RcParams(0.37, 2.5)
    assert tree_phi(regular_tree(1, 1), par) == pytest.approx(par.phat, abs=1e-14)
    assert tree_phi(regular_tree(1, 2), RcParams(0.5, 2)) == pytest.approx(1 / 9, abs=1e-14)
    empty = TreeSpec([-1, 0, 0], height=3)
    assert empty.boundary() == []
    assert tree_phi(empty, par) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=8), st.floats(0.05, 0.95),
       st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_two_recursions_agree(counts, p, q):
    if sum(counts) == 0:
        counts = [1]
    tree = tree_from_offspring(counts)
    par = RcParams(p, q)
    assert abs(tree_phi(tree, par) - tree_phi_partition(tree, par)) <= 1e-10
    # a height-0 tree has its root on the boundary
    assert 0 <= tree_phi(tree, par) < 1 or tree.height == 0


def test_decay_fit_examples():
    fit = decay_fit([(h, 0.3**h) for h in range(1, 8)])
    assert abs(fit.rate - 0.3) <= 1e-9
    assert decay_fit([(h, 0.2) for h in range(5)]).rate == pytest.approx(1.0)
    par = RcParams(0.4, 2)
    tree_rate = decay_fit([(h, tree_phi(regular_tree(2, h), par)) for h in range(2, 15)]).rate
    assert par.phat == pytest.approx(0.25)
    assert par.phat - 0.02 <= tree_rate < 1


def test_decay_fit_drops_zeros():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        fit = decay_fit([(1, 0.5), (2, 0.0), (3, 0.125), (4, 0.0625)])
    assert fit.dropped == 1 and w
    with pytest.raises(InvalidInputError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            decay_fit([(1, 0.5), (2, 0.0), (3, 0.1)])


def test_gw_volume_tail_decreasing():
    samples = 10_000
    tail = gw_volume_tail(1.5, 2.0, range(4, 11), samples, seed=0)
    vals = [tail[l] for l in range(4, 11)]
    for a, b in zip(vals, vals[1:]):
        sd = math.sqrt(max(a * (1 - a), 1 / samples) / samples)
        assert b < a + 2 * sd
    assert vals[-1] < vals[0]


@pytest.mark.parametrize("branching", [1, 2, 3])
def test_regular_tree_phi_matches_full_recursion(branching):
    for q in (1.0, 1.5, 2.0, 3.0):
        par = RcParams(0.45, q)
        for h in range(0, 7):
            full = tree_phi(regular_tree(branching, h), par)
            assert abs(regular_tree_phi(branching, h, par) - full) <= 1e-12
