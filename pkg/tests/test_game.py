import numpy as np
import pytest
from hypothesis import given, strategies as st

from pplab.buyers import OptimalBuyer, ScriptedBuyer, TruthfulBuyer
from pplab.game import (ConfigurationError, GameConfig, Transcript, acceptance_time,
                        discounted_surplus, lie_count, play_game, replay, revenue,
                        score_game, strategic_regret)
from pplab.sellers import Bisection, FastSearch, MonotoneGeometric, PenalizedFastSearch

unit = st.floats(0.0, 1.0, allow_nan=False)
gammas = st.floats(0.0, 0.99, allow_nan=False)


def machines(T):
    return st.one_of(
        st.floats(0.05, 0.99).map(lambda b: MonotoneGeometric(T, b)),
        st.just(FastSearch(T)),
        st.integers(1, 4).map(lambda r: PenalizedFastSearch(T, r)),
        st.just(Bisection(T)),
    )


@st.composite
def games(draw, max_T=40):
    T = draw(st.integers(1, max_T))
    return draw(machines(T)), GameConfig(T, draw(gammas), draw(unit))


def test_monotone_half_truthful_transcript():
    cfg = GameConfig(4, 0.9, 0.75)
    tr = play_game(MonotoneGeometric(4, 0.5), TruthfulBuyer(0.75), cfg)
    assert tr.rounds == [(1, 1.0, 0), (2, 0.5, 1), (3, 0.5, 1), (4, 0.5, 1)]
    assert strategic_regret(tr, cfg) == 1.5
    assert acceptance_time(tr) == 2


def test_valuation_one_accepts_everything():
    cfg = GameConfig(5, 0.5, 1.0)
    tr = play_game(MonotoneGeometric(5, 0.3), TruthfulBuyer(1.0), cfg)
    assert tr.decisions == (1,) * 5
    assert tr.prices.tolist() == [1.0] * 5


def test_bisection_optimal_play():
    cfg = GameConfig(3, 0.9, 0.75)
    m = Bisection(3)
    tr = play_game(m, OptimalBuyer(m, cfg), cfg)
    assert tr.prices.tolist() == [0.5, 0.25, 0.375]
    assert tr.decisions == (0, 1, 1)
    assert discounted_surplus(tr, cfg) == pytest.approx(0.75375, abs=1e-12)


def test_surplus_examples():
    cfg = GameConfig(3, 0.9, 0.75)
    assert discounted_surplus(Transcript([0.5, 0.25, 0.375], [0, 0, 0]), cfg) == 0.0
    assert discounted_surplus(Transcript([0.3], [1]), GameConfig(1, 0.5, 0.8)) == pytest.approx(0.5)
    # gamma = 0 keeps the first round
    assert discounted_surplus(Transcript([0.3, 0.3], [1, 1]), GameConfig(2, 0.0, 0.8)) == pytest.approx(0.5)


def test_regret_examples():
    assert strategic_regret(Transcript([0.9] * 10, [0] * 10), GameConfig(10, 0.5, 0.6)) == pytest.approx(6.0)
    assert strategic_regret(Transcript([0.4] * 5, [1] * 5), GameConfig(5, 0.5, 0.4)) == pytest.approx(0.0)


def test_acceptance_time_examples():
    assert acceptance_time(Transcript([0.5] * 4, [0] * 4)) is None
    assert acceptance_time(Transcript([0.5] * 4, [0, 0, 1, 0])) == 3


def test_lie_count_counts_rejections_below_value():
    tr = Transcript([0.2, 0.7, 0.5, 0.5], [0, 0, 0, 1])
    assert lie_count(tr, 0.5) == 1          # 0.5 == v is not a lie


def test_horizon_mismatch_is_rejected():
    with pytest.raises(ConfigurationError):
        play_game(FastSearch(10), TruthfulBuyer(0.5), GameConfig(11, 0.5, 0.5))
    m = FastSearch(10)
    with pytest.raises(ConfigurationError):
        play_game(m, OptimalBuyer(m, GameConfig(10, 0.5, 0.5)), GameConfig(11, 0.5, 0.5))
    with pytest.raises(ConfigurationError):
        discounted_surplus(Transcript([0.5], [1]), GameConfig(2, 0.5, 0.5))


@pytest.mark.parametrize("kw", [dict(T=0, gamma=0.5, v=0.5), dict(T=3, gamma=1.0, v=0.5),
                                dict(T=3, gamma=0.5, v=1.5), dict(T=2.5, gamma=0.5, v=0.5)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        GameConfig(**kw)


def test_transcript_is_read_only_and_bounded():
    tr = Transcript([0.5], [1])
    with pytest.raises(ValueError):
        tr.prices[0] = 0.1
    with pytest.raises(ValueError):
        Transcript([1.5], [1])


@given(games())
def test_regret_is_sum_of_per_round_losses(game):
    m, cfg = game
    tr = play_game(m, TruthfulBuyer(cfg.v), cfg)
    per_round = sum(cfg.v - a * p for _, p, a in tr)
    assert strategic_regret(tr, cfg) == pytest.approx(per_round, abs=1e-9)
    assert len(tr) == cfg.T and [t for t, _, _ in tr] == list(range(1, cfg.T + 1))
    assert np.all((tr.prices >= 0) & (tr.prices <= 1))


@given(games())
def test_truthful_buyer_never_lies_and_gains(game):
    m, cfg = game
    out = score_game(play_game(m, TruthfulBuyer(cfg.v), cfg), cfg)
    assert out.lie_count == 0
    assert out.surplus >= 0.0
    assert out.regret == cfg.T * cfg.v - out.revenue


@given(games(), st.data())
def test_replay_reproduces_transcript(game, data):
    m, cfg = game
    decisions = data.draw(st.lists(st.booleans(), min_size=cfg.T, max_size=cfg.T))
    tr = play_game(m, ScriptedBuyer(decisions), cfg)
    assert replay(m, decisions) == tr
    assert play_game(m, ScriptedBuyer(tr.decisions), cfg) == tr


@given(st.integers(2, 60), st.floats(0.05, 0.99), unit)
def test_monotone_regret_identity(T, beta, v):
    # rounds before kappa pay nothing, rounds from kappa on pay p_kappa
    cfg = GameConfig(T, 0.5, v)
    tr = play_game(MonotoneGeometric(T, beta), TruthfulBuyer(v), cfg)
    k = acceptance_time(tr)
    if k is None:
        assert strategic_regret(tr, cfg) == pytest.approx(T * v)
        return
    p = tr.prices[k - 1]
    assert strategic_regret(tr, cfg) == pytest.approx(v * (k - 1) + (T - k + 1) * (v - p), abs=1e-9)
    # the textbook form v*k + (T-k)(v-p) over-counts by exactly p_kappa
    assert v * k + (T - k) * (v - p) - strategic_regret(tr, cfg) == pytest.approx(p, abs=1e-9)


def test_revenue_is_undiscounted():
    tr = Transcript([0.5, 0.5], [1, 1])
    assert revenue(tr) == 1.0
    assert discounted_surplus(tr, GameConfig(2, 0.5, 1.0)) == pytest.approx(0.75)
