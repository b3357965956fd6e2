"""Game parameters, play records, and the round-by-round engine.

A game is ``T`` rounds of take-it-or-leave-it offers.  The seller is any
:class:`~pplab.sellers.SellerMachine`; the buyer is any object with a
``decide(t, price, history)`` method (see :mod:`pplab.buyers`).

Money is plain float64.  The buyer discounts round ``t`` by ``gamma**(t-1)``
(with ``0**0 == 1``); the seller's revenue is never discounted.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np


class ConfigurationError(ValueError):
    """Seller, buyer and game parameters do not fit together."""


class IntractableError(RuntimeError):
    """An exact computation would exceed its configured size guard."""


@dataclass(frozen=True)
class GameConfig:
    T: int
    gamma: float
    v: float

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T!r}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma!r}")
        if not 0.0 <= self.v <= 1.0:
            raise ValueError(f"v must lie in [0, 1], got {self.v!r}")
        object.__setattr__(self, "T", int(self.T))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "v", float(self.v))

    def discounts(self) -> np.ndarray:
        return np.power(self.gamma, np.arange(self.T, dtype=float))


@dataclass(frozen=True, eq=False)
class Transcript:
    """Prices offered and decisions taken, one entry per round.

    Stored as two read-only arrays; ``rounds`` gives the ``(t, p_t, a_t)``
    view with ``t`` starting at 1.
    """

    prices: np.ndarray
    accepted: np.ndarray

    def __post_init__(self):
        prices = np.array(self.prices, dtype=float)
        accepted = np.array(self.accepted, dtype=bool)
        if prices.ndim != 1 or prices.shape != accepted.shape:
            raise ValueError("prices and decisions must be 1-d and of equal length")
        if prices.size and (prices.min() < 0.0 or prices.max() > 1.0):
            raise ValueError("prices must lie in [0, 1]")
        prices.setflags(write=False)
        accepted.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "accepted", accepted)

    def __len__(self) -> int:
        return int(self.prices.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Transcript):
            return NotImplemented
        return (np.array_equal(self.prices, other.prices)
                and np.array_equal(self.accepted, other.accepted))

    @property
    def rounds(self) -> list[tuple[int, float, int]]:
        return list(self)

    def __iter__(self) -> Iterator[tuple[int, float, int]]:
        for i, (p, a) in enumerate(zip(self.prices.tolist(), self.accepted.tolist())):
            yield i + 1, p, int(a)

    @property
    def decisions(self) -> tuple[int, ...]:
        return tuple(int(a) for a in self.accepted.tolist())


@dataclass(frozen=True)
class GameOutcome:
    revenue: float
    regret: float
    surplus: float
    kappa_star: int | None
    lie_count: int


def _check_length(transcript: Transcript, config: GameConfig):
    if len(transcript) != config.T:
        raise ConfigurationError(
            f"transcript has {len(transcript)} rounds but the game has T={config.T}")


def discounted_surplus(transcript: Transcript, config: GameConfig) -> float:
    """Buyer's discounted surplus; negative when buying above value."""
    _check_length(transcript, config)
    gains = np.where(transcript.accepted, config.v - transcript.prices, 0.0)
    return float(np.dot(config.discounts(), gains))


def revenue(transcript: Transcript) -> float:
    return float(transcript.prices[transcript.accepted].sum())


def strategic_regret(transcript: Transcript, config: GameConfig) -> float:
    """``T*v`` minus the (undiscounted) revenue."""
    _check_length(transcript, config)
    return config.T * config.v - revenue(transcript)


def acceptance_time(transcript: Transcript) -> int | None:
    hits = np.flatnonzero(transcript.accepted)
    return int(hits[0]) + 1 if hits.size else None


def lie_count(transcript: Transcript, v: float) -> int:
    return int(np.count_nonzero(~transcript.accepted & (transcript.prices < v)))


def score_game(transcript: Transcript, config: GameConfig) -> GameOutcome:
    rev = revenue(transcript)
    _check_length(transcript, config)
    return GameOutcome(
        revenue=rev,
        regret=config.T * config.v - rev,
        surplus=discounted_surplus(transcript, config),
        kappa_star=acceptance_time(transcript),
        lie_count=lie_count(transcript, config.v),
    )


def play_game(seller, buyer, config: GameConfig) -> Transcript:
    """Play ``config.T`` rounds of ``seller`` against ``buyer``.

    The seller's state only ever moves through ``seller.advance`` on the
    buyer's actual decisions.  Buyers flagged ``stationary`` (decision is a
    function of the price alone) are fast-forwarded once the seller is
    locked on a constant price.
    """
    if seller.T != config.T:
        raise ConfigurationError(
            f"seller was built for T={seller.T} but the game has T={config.T}")
    buyer_T = getattr(buyer, "T", None)
    if buyer_T is not None and buyer_T != config.T:
        raise ConfigurationError(
            f"buyer was built for T={buyer_T} but the game has T={config.T}")

    T = config.T
    prices = np.empty(T, dtype=float)
    accepted = np.zeros(T, dtype=bool)
    history: list[bool] = []
    state = seller.initial_state()
    stationary = getattr(buyer, "stationary", False)
    t = 1
    while t <= T:
        price = seller.quote(state)
        if stationary and seller.constant_price(state) is not None:
            a = bool(buyer.decide(t, price, history))
            prices[t - 1:] = price
            accepted[t - 1:] = a
            break
        a = bool(buyer.decide(t, price, history))
        prices[t - 1] = price
        accepted[t - 1] = a
        history.append(a)
        state = seller.advance(state, a)
        t += 1
    return Transcript(prices, accepted)


def replay(seller, decisions) -> Transcript:
    """Transcript produced by a fixed decision sequence (one per round)."""
    state = seller.initial_state()
    prices = []
    for a in decisions:
        prices.append(seller.quote(state))
        state = seller.advance(state, bool(a))
    return Transcript(prices, [bool(a) for a in decisions])
