import math

import pytest
from hypothesis import assume, given, strategies as st

from pplab.buyers import ScriptedBuyer, TruthfulBuyer
from pplab.game import GameConfig, play_game
from pplab.sellers import (Bisection, FastSearch, MonotoneGeometric, MonotoneSequence,
                           PenalizedFastSearch, SellerSpec, ceil_log, is_convex_sequence,
                           make_seller, phase_bound, phase_log)


def truthful_play(machine, v):
    return play_game(machine, TruthfulBuyer(v), GameConfig(machine.T, 0.0, v))


def test_fast_search_truthful_trace():
    m = FastSearch(100)
    tr = truthful_play(m, 0.8)
    assert tr.prices[:5].tolist() == [0.5, 1.0, 0.75, 1.0, 0.8125]
    assert tr.decisions[:5] == (1, 0, 1, 0, 0)
    log = phase_log(m, tr.decisions)
    assert [(p.a, p.b, p.eps) for p in log[:4]] == [
        (0.0, 1.0, 0.5), (0.5, 1.0, 0.25), (0.75, 1.0, 0.0625), (0.75, 0.8125, 2.0 ** -8)]
    assert tr.prices[5] == 0.75 + 2.0 ** -8


def test_fast_search_single_round_quotes_half():
    assert FastSearch(1).quote(FastSearch(1).initial_state()) == 0.5


def test_fast_search_accepting_cap_locks_price():
    tr = truthful_play(FastSearch(50), 1.0)
    assert tr.prices.tolist() == [0.5] + [1.0] * 49
    assert all(tr.decisions)


@given(st.floats(0.05, 0.99), st.integers(1, 30))
def test_monotone_quotes_powers_of_beta(beta, T):
    m = MonotoneGeometric(T, beta)
    tr = play_game(m, ScriptedBuyer([0] * T), GameConfig(T, 0.5, 0.5))
    assert tr.prices.tolist() == pytest.approx([beta ** k for k in range(T)])


@given(st.floats(0.05, 0.99), st.integers(1, 60), st.floats(0, 1), st.data())
def test_monotone_prices_freeze_after_acceptance(beta, T, v, data):
    m = MonotoneGeometric(T, beta)
    decisions = data.draw(st.lists(st.booleans(), min_size=T, max_size=T))
    tr = play_game(m, ScriptedBuyer(decisions), GameConfig(T, 0.5, v))
    p = tr.prices.tolist()
    assert all(a >= b for a, b in zip(p, p[1:]))
    if any(decisions):
        k = decisions.index(True)
        assert len(set(p[k:])) == 1


def test_sequence_machine_pads_with_last_price():
    m = MonotoneSequence(5, (1.0, 0.6, 0.4))
    assert m.price_path([0] * 5) == [1.0, 0.6, 0.4, 0.4, 0.4]


@pytest.mark.parametrize("spec", [
    SellerSpec("monotone", beta=1.0), SellerSpec("monotone", beta=0.0),
    SellerSpec("monotone-seq", prices=(1.0, 0.5, 0.7)), SellerSpec("monotone-seq", prices=(0.9, 0.5)),
    SellerSpec("pfs", r=0), SellerSpec("pfs", r=1.5), SellerSpec("pfs"),
    SellerSpec("pfs", r=2, semantics="loose"), SellerSpec("auction"),
])
def test_make_seller_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        make_seller(spec, 10)


def test_make_seller_kinds():
    assert make_seller("fast-search", 8) == FastSearch(8)
    assert make_seller({"kind": "pfs", "r": 3}, 8) == PenalizedFastSearch(8, 3)
    assert make_seller("bisection", 8) == Bisection(8)
    assert make_seller({"kind": "monotone-seq", "prices": [1, 0.5]}, 4).prices == (1.0, 0.5)


def test_convexity_examples():
    assert is_convex_sequence([0.9 ** k for k in range(30)])
    assert is_convex_sequence([1.0 - 0.05 * k for k in range(20)])
    assert not is_convex_sequence((1.0, 0.9, 0.5))
    with pytest.raises(ValueError):
        is_convex_sequence((0.5, 0.6))


@pytest.mark.parametrize("T,expected", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (16, 3),
                                        (17, 4), (256, 4), (257, 5), (65536, 5), (65537, 6)])
def test_phase_bound(T, expected):
    assert phase_bound(T) == expected
    if T > 2:
        assert expected == math.ceil(math.log2(math.log2(T)) - 1e-12) + 1


def test_ceil_log():
    assert [ceil_log(T) for T in (1, 2, 3, 100, 10000)] == [1, 1, 2, 5, 10]


@given(st.integers(1, 2 ** 20), st.floats(0, 1))
def test_fast_search_phase_count_and_interval(T, v):
    m = FastSearch(T)
    tr = truthful_play(m, v)
    log = phase_log(m, tr.decisions)
    assert sum(not p.terminal for p in log) <= phase_bound(T)
    for p in log:
        assert p.a <= v <= p.b
        assert 0.0 <= p.a <= p.b <= 1.0


@given(st.integers(2, 300), st.integers(1, 6), st.floats(0, 1))
def test_strict_pfs_requotes_rejected_price(T, r, v):
    m = PenalizedFastSearch(T, r)
    tr = truthful_play(m, v)
    p, a = tr.prices.tolist(), tr.decisions
    t = 0
    while t < T:
        if m.constant_price(_state_at(m, a[:t])) is not None:
            break
        if a[t]:
            t += 1
            continue
        run = 1
        while t + run < T and p[t + run] == p[t] and run < r:
            run += 1
        assert run == min(r, T - t)
        t += run


def _state_at(m, decisions):
    s = m.initial_state()
    for d in decisions:
        s = m.advance(s, bool(d))
    return s


@given(st.integers(2, 200), st.floats(0, 1))
def test_pfs_one_is_fast_search(T, v):
    assert truthful_play(PenalizedFastSearch(T, 1), v) == truthful_play(FastSearch(T), v)


@given(st.integers(2, 200), st.integers(1, 5), st.data())
def test_literal_pfs_moves_left_regardless(T, r, data):
    m = PenalizedFastSearch(T, r, "literal")
    s = m.advance(m.initial_state(), False)
    held = m.quote(m.initial_state())
    answers = data.draw(st.lists(st.booleans(), min_size=r, max_size=r))
    for a in answers:
        assert m.quote(s) == held
        s = m.advance(s, a)
    assert m.quote(s) < held


@given(st.integers(1, 64), st.data())
def test_machines_are_deterministic_values(T, data):
    spec = data.draw(st.sampled_from([SellerSpec("fast-search"), SellerSpec("pfs", r=3),
                                      SellerSpec("monotone", beta=0.7), SellerSpec("bisection")]))
    m1, m2 = make_seller(spec, T), make_seller(spec, T)
    decisions = data.draw(st.lists(st.booleans(), min_size=T, max_size=T))
    s1, s2 = m1.initial_state(), m2.initial_state()
    for d in decisions:
        assert s1 == s2 and hash(s1) == hash(s2)
        assert m1.quote(s1) == m2.quote(s2)
        assert 0.0 <= m1.quote(s1) <= 1.0
        s1, s2 = m1.advance(s1, d), m2.advance(s2, d)
    assume(T > 1)
