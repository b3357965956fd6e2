import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from pplab.analysis import (C_THM1, audit_rejections, bound_report, closed_form_F, g_ratio,
                            lemma3_exact, lemma3_monte_carlo, lemma3_play_check,
                            lemma_numeric_checks, penalty_objective, pfs_upper_bound,
                            prop1_lower, prop6_lower, prop6_threshold, r_star,
                            rejection_condition, thm1_upper_bound, worst_case_valuation)
from pplab.buyers import OptimalBuyer
from pplab.game import GameConfig, play_game
from pplab.sellers import MonotoneGeometric, MonotoneSequence, PenalizedFastSearch, phase_bound

admissible_g0 = st.floats(0.5, 0.999).filter(lambda x: x > 0.5)
horizons = st.integers(5, 10 ** 7)


def test_report_constants():
    rep = bound_report(0.9, 0.5, 100, r=1)
    assert rep.T_gamma == pytest.approx(10.0)
    assert rep.C_gamma == pytest.approx(4.5)
    assert rep.prop1_lower == pytest.approx(2.3717082451, abs=1e-9)
    assert rep.corollary_lower == max(rep.kau_lower, rep.kl_lower)
    assert rep.kau_lower == pytest.approx(10 / 12)
    assert rep.kl_lower == pytest.approx(math.log(math.log(100)))
    assert rep.thm1_bound is None and not rep.thm1_applicable


def test_small_gamma_limit_matches_truthful_bound():
    for T in (16, 256, 10 ** 4):
        for v in (0.2, 0.9):
            assert pfs_upper_bound(1e-12, v, T, 1) == pytest.approx((v + 1) * phase_bound(T))


def test_thm1_formula():
    g0, v, T = 0.8, 0.6, 1024
    Tg0 = 5.0
    expected = (2 * v * g0 * Tg0 * math.log(4 * math.log(2) * T) + 1 + v) * (math.log2(10) + 1) + 4 * Tg0
    assert thm1_upper_bound(g0, v, T) == pytest.approx(expected)
    assert C_THM1 == pytest.approx(2.772588722239781)


def test_applicability_flags():
    rep = bound_report(0.6, 0.5, 1000, r=3, gamma0=0.8)
    assert rep.thm1_applicable and rep.thm1_bound is not None
    assert not bound_report(0.4, 0.5, 1000, gamma0=0.8).thm1_applicable
    assert not bound_report(0.6, 0.5, 4, gamma0=0.8).thm1_applicable
    assert not bound_report(0.9, 0.5, 5).prop6_applicable
    assert bound_report(0.9, 0.5, 100).prop6_applicable
    assert prop6_threshold(0.5) == pytest.approx(2 + 2 * math.log(4) / math.log(2))


@pytest.mark.parametrize("kw", [dict(gamma=1.0, v=0.5, T=10), dict(gamma=0.5, v=0.5, T=0),
                                dict(gamma=0.5, v=0.5, T=10, r=0),
                                dict(gamma=0.5, v=0.5, T=10, gamma0=1.0)])
def test_report_rejects_bad_parameters(kw):
    with pytest.raises(ValueError):
        bound_report(**kw)


@given(st.floats(0.0, 0.999), st.floats(0, 1), st.integers(1, 10 ** 9), st.integers(1, 50),
       st.floats(0.01, 10))
def test_report_values_finite(g, v, T, r, C):
    rep = bound_report(g, v, T, r, C=C)
    for name in ("eq_reggamma_bound", "prop1_lower", "prop6_lower", "kau_lower", "kl_lower"):
        assert math.isfinite(getattr(rep, name)) and getattr(rep, name) >= 0
    assert rep.corollary_lower == max(rep.kau_lower, rep.kl_lower)


def test_rstar_reference_point():
    res = r_star(0.75, 100, "scan")
    assert res.r_star == 17
    assert res.r_bar_star == pytest.approx(16.5555, abs=1e-3)
    assert r_star(0.75, 100).r_star == 17
    f = penalty_objective(np.arange(1, 201), 0.75, 100)
    assert int(np.argmin(f)) + 1 == 17


def test_rstar_preconditions():
    with pytest.raises(ValueError):
        r_star(0.4, 100, "closed-form")
    with pytest.raises(ValueError):
        r_star(0.75, 4, "closed-form")
    with pytest.raises(ValueError):
        r_star(1.0, 100, "scan")
    assert r_star(0.3, 100, "scan").r_star >= 1


@given(admissible_g0, horizons)
def test_rstar_methods_agree_and_bracket(g0, T):
    closed, scan = r_star(g0, T, "closed-form"), r_star(g0, T, "scan")
    assert closed.r_star == max(1, math.ceil(closed.r_bar_star))
    assert abs(closed.r_star - scan.r_star) <= 1
    assert 1 / (4 * T * math.log(2)) <= closed.F_value <= 2 / T
    assert closed.F_value == pytest.approx(g0 ** closed.r_bar_star, rel=1e-9)


@given(admissible_g0, horizons)
def test_closed_form_solves_stationarity(g0, T):
    # d/dr of the objective vanishes at rbar
    rbar = r_star(g0, T).r_bar_star
    h = 1e-6 * max(1.0, rbar)
    d = (penalty_objective(rbar + h, g0, T) - penalty_objective(rbar - h, g0, T)) / (2 * h)
    assert abs(float(d)) < 1e-3


@given(st.floats(0.05, 0.999), horizons)
def test_penalty_objective_convex(g0, T):
    f = penalty_objective(np.arange(1, 200), g0, T)
    second = np.diff(f, 2)
    assert np.all(second >= -1e-9 * np.abs(f[2:]))


def test_rejection_condition_examples():
    assert 0.5 ** 1 / ((1 - 0.5) * (1 - 0.5)) == 2.0
    assert rejection_condition(0.7, 0.5, 0.1, 0.05, 0.5, 1)         # 0.2 < 2 * 0.125
    assert not rejection_condition(0.7, 0.5, 0.05, 0.0, 0.5, 1)     # 0.2 >= 0.1


@given(st.floats(0, 1), st.floats(0, 1), st.floats(1e-6, 0.5), st.floats(0, 0.5),
       st.floats(0.01, 0.99), st.integers(1, 10))
def test_rejecting_above_value_always_satisfies(v, p, dl, dr, g, r):
    assume(v <= p)
    assert rejection_condition(v, p, dl, dr, g, r)


@given(st.integers(2, 200), st.floats(0.01, 0.99), st.floats(0, 1), st.integers(1, 5))
def test_optimal_rejections_satisfy_condition(T, g, v, r):
    m = PenalizedFastSearch(T, r)
    cfg = GameConfig(T, g, v)
    tr = play_game(m, OptimalBuyer(m, cfg), cfg)
    for node in audit_rejections(m, tr.decisions, cfg):
        assert node.holds, node


def test_audit_sees_each_rejected_node_once():
    m = PenalizedFastSearch(40, 3)
    cfg = GameConfig(40, 0.3, 0.8)
    tr = play_game(m, OptimalBuyer(m, cfg), cfg)
    nodes = audit_rejections(m, tr.decisions, cfg)
    # 1.0 is rejected three times in a row but is one node
    assert [n.t for n in nodes][:2] == [2, 6]
    assert all(n.delta_l >= 0 and n.delta_r >= 0 for n in nodes)


def test_g_ratio_values():
    assert g_ratio(0.5) == pytest.approx(2 * math.log(2))
    assert g_ratio(0.9) == pytest.approx(1.0536051566, abs=1e-9)


def test_lemma_numeric_checks_pass():
    rep = lemma_numeric_checks(1000, bracket_pairs=[(0.6, 10), (0.9, 1000), (0.99, 10 ** 6)])
    assert rep.passed, rep.lines()
    with pytest.raises(ValueError):
        lemma_numeric_checks(5)


def test_lemma3_constant_sequence():
    ek, eg = lemma3_exact([0.5] * 10)
    assert ek == pytest.approx(1.0) and eg == pytest.approx(0.25)
    res = lemma3_monte_carlo([0.5] * 10, 10 ** 4, seed=1)
    assert res.mean_kappa == 1.0 and res.product == pytest.approx(0.25, abs=0.01)


def test_lemma3_geometric():
    prices = [0.99 ** k for k in range(200)]
    res = lemma3_monte_carlo(prices, 10 ** 5, seed=0)
    assert res.holds
    assert res.mean_kappa == pytest.approx(res.exact_kappa, rel=0.02)
    assert res.mean_gap == pytest.approx(res.exact_gap, rel=0.02)


@st.composite
def decreasing_sequences(draw):
    drops = draw(st.lists(st.floats(0.001, 1.0), min_size=2, max_size=60))
    end = draw(st.floats(0.0, 0.5))
    c = np.concatenate([[0.0], np.cumsum(drops)])
    return (1.0 - (1.0 - end) * c / c[-1]).tolist()


@given(decreasing_sequences())
def test_lemma3_exact_product_bound(prices):
    ek, eg = lemma3_exact(prices)
    assert ek * eg >= 1 / 32


@given(decreasing_sequences(), st.floats(0.5, 1.0))
def test_acceptance_index_matches_play(prices, v):
    p = np.asarray(prices)
    expected = int(np.argmax(p <= v)) + 1
    assert lemma3_play_check(prices, v) == expected


def test_lemma3_input_checks():
    with pytest.raises(ValueError):
        lemma3_monte_carlo([1.0, 0.8, 0.9, 0.4])
    with pytest.raises(ValueError):
        lemma3_monte_carlo([1.0, 0.8])
    with pytest.raises(ValueError):
        lemma3_monte_carlo([1.0, 0.4], samples=100)


def test_worst_case_examples():
    grid = np.round(np.arange(0, 1001) * 1e-3, 3)
    w = worst_case_valuation(MonotoneSequence(20, (0.0,)), 20, 0.5, "truthful", grid)
    assert (w.v0, w.regret) == (1.0, 20.0)
    w = worst_case_valuation(MonotoneSequence(20, (1.0,)), 20, 0.5, "truthful", grid)
    assert w.v0 == 0.999 and w.regret == pytest.approx(20 * 0.999)
    T = 100
    w = worst_case_valuation(MonotoneGeometric(T, 0.995), T, 0.5, "truthful",
                             np.round(np.arange(500, 1001) * 1e-3, 3))
    assert w.regret >= prop1_lower(T)
    # 0.995**99 > 1/2: the lowest valuation never buys
    assert w.diagnostics == {"kappa_min": 1, "kappa_max": None}


@given(st.integers(4, 3000), st.floats(0.3, 0.9999))
def test_monotone_lower_bound_witness(T, beta):
    grid = np.round(np.arange(500, 1001) * 1e-3, 3)
    w = worst_case_valuation(MonotoneGeometric(T, beta), T, 0.5, "truthful", grid)
    assert w.regret >= 0.99 * prop1_lower(T)


@pytest.mark.parametrize("g,T", [(0.5, 60), (0.8, 120), (0.9, 60)])
@pytest.mark.parametrize("beta", [0.9, 0.97, 0.99])
def test_convex_lower_bound_against_optimal_buyer(g, T, beta):
    assert T >= prop6_threshold(g)
    w = worst_case_valuation(MonotoneGeometric(T, beta), T, g, "dp",
                             np.round(np.arange(0, 101) * 0.01, 2))
    assert w.regret >= prop6_lower(g, T)
