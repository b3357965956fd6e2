"""Announced seller algorithms as explicit state machines.

Every machine is a frozen dataclass holding only parameters; the evolving
part lives in a separate, hashable state value:

    state = machine.initial_state()
    price = machine.quote(state)
    state = machine.advance(state, accepted)

Two states that compare equal have identical futures, which is what lets
the best-response solver in :mod:`pplab.buyers` memoize on them.

Besides the per-round interface, machines expose a *node-level* step,
``node_step(state) -> (price, accept_state, reject_state, reject_rounds)``,
describing one node of the algorithm's price tree.  For everything except
penalized fast search a rejection costs one round.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, NamedTuple, Sequence

SELLER_KINDS = ("monotone", "monotone-seq", "fast-search", "pfs", "bisection")
SEMANTICS = ("strict", "literal")


class SellerMachine:
    kind: ClassVar[str] = "abstract"
    # states are hashable values whose equality implies equal futures
    canonical_states: ClassVar[bool] = True
    T: int

    def initial_state(self):
        raise NotImplementedError

    def quote(self, state) -> float:
        raise NotImplementedError

    def advance(self, state, accepted: bool):
        raise NotImplementedError

    def node_step(self, state):
        return self.quote(state), self.advance(state, True), self.advance(state, False), 1

    def constant_price(self, state) -> float | None:
        """Price quoted forever from ``state`` on, whatever the buyer does."""
        return None

    def price_floor(self, state) -> float | None:
        """Lower bound on every price quoted from ``state`` on (current included)."""
        return None

    def price_path(self, decisions: Sequence[int]) -> list[float]:
        state = self.initial_state()
        out = []
        for a in decisions:
            out.append(self.quote(state))
            state = self.advance(state, bool(a))
        return out


class MonotoneState(NamedTuple):
    index: int      # 0-based position in the price sequence
    frozen: bool    # a price has been accepted


class _Monotone(SellerMachine):
    """Generic monotone skeleton: walk down a price list, freeze on first acceptance."""

    def price_at(self, index: int) -> float:
        raise NotImplementedError

    def initial_state(self):
        return MonotoneState(0, False)

    def quote(self, state):
        return self.price_at(state.index)

    def advance(self, state, accepted):
        if state.frozen:
            return state
        if accepted:
            return MonotoneState(state.index, True)
        return MonotoneState(min(state.index + 1, self.T - 1), False)

    def constant_price(self, state):
        if state.frozen or state.index == self.T - 1:
            return self.price_at(state.index)
        return None

    def price_floor(self, state):
        if state.frozen:
            return self.price_at(state.index)
        return self.price_at(self.T - 1)


@dataclass(frozen=True)
class MonotoneGeometric(_Monotone):
    """Prices 1, beta, beta**2, ... until the first acceptance."""

    T: int
    beta: float
    kind: ClassVar[str] = "monotone"

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta!r}")

    def price_at(self, index):
        return self.beta ** index


@dataclass(frozen=True)
class MonotoneSequence(_Monotone):
    """Monotone algorithm over an explicit non-increasing price list.

    Shorter lists are padded with their last price.
    """

    T: int
    prices: tuple[float, ...]
    kind: ClassVar[str] = "monotone-seq"

    def __post_init__(self):
        prices = tuple(float(p) for p in self.prices)
        if not prices:
            raise ValueError("price sequence is empty")
        if any(not 0.0 <= p <= 1.0 for p in prices):
            raise ValueError("prices must lie in [0, 1]")
        for i in range(len(prices) - 1):
            if prices[i + 1] > prices[i]:
                raise ValueError(
                    f"price sequence increases at position {i + 2}: "
                    f"{prices[i]!r} -> {prices[i + 1]!r}")
        object.__setattr__(self, "prices", prices)

    def price_at(self, index):
        return self.prices[min(index, len(self.prices) - 1)]


class FastSearchState(NamedTuple):
    a: float
    b: float
    eps: float
    k: int          # grid offsets already accepted in this phase
    terminal: bool  # locked on price ``a``


@dataclass(frozen=True)
class FastSearch(SellerMachine):
    """Phase-based search over a feasible interval ``[a, b]``.

    A phase offers ``a + eps, a + 2*eps, ...`` (capped at ``b``).  Rejecting
    ``a + k*eps`` starts a new phase on ``[a + (k-1)*eps, a + k*eps]`` with
    ``eps**2``.  Once a new phase would have width ``<= 1/T`` the machine
    quotes its lower end ``a`` forever.  Accepting the cap ``b`` itself
    locks on ``b``.
    """

    T: int
    kind: ClassVar[str] = "fast-search"

    def initial_state(self):
        return FastSearchState(0.0, 1.0, 0.5, 0, False)

    def quote(self, state):
        if state.terminal:
            return state.a
        return min(state.a + (state.k + 1) * state.eps, state.b)

    def _new_phase(self, a, b, eps):
        if b - a <= 1.0 / self.T:
            return FastSearchState(a, b, eps, 0, True)
        return FastSearchState(a, b, eps, 0, False)

    def advance(self, state, accepted):
        if state.terminal:
            return state
        price = self.quote(state)
        if accepted:
            if price >= state.b:
                return self._new_phase(price, state.b, state.eps * state.eps)
            return FastSearchState(state.a, state.b, state.eps, state.k + 1, False)
        return self._new_phase(state.a + state.k * state.eps, price, state.eps * state.eps)

    def constant_price(self, state):
        return state.a if state.terminal else None

    def price_floor(self, state):
        return state.a


class PFSState(NamedTuple):
    base: FastSearchState
    rejections: int     # strict: rejections of the current price so far
    hold_price: float   # literal: price being re-offered after a rejection
    hold: int           # literal: re-offers still owed


@dataclass(frozen=True)
class PenalizedFastSearch(SellerMachine):
    """Fast search where a rejected price keeps being offered for a while.

    ``strict``: a rejected price is quoted until it has been rejected ``r``
    times in total; accepting any of those quotes takes the accept branch.
    Every node of the underlying tree is therefore reached with rejection
    edges worth ``r`` rounds.

    ``literal``: after a rejection the machine commits to the reject branch
    and re-offers the same price for ``r`` further rounds, whatever the buyer
    answers (acceptances there still earn revenue).
    """

    T: int
    r: int
    semantics: str = "strict"
    base: FastSearch = field(init=False, repr=False, compare=False)
    kind: ClassVar[str] = "pfs"

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be an integer >= 1, got {self.r!r}")
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown penalty semantics {self.semantics!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "base", FastSearch(self.T))

    def initial_state(self):
        return PFSState(self.base.initial_state(), 0, 0.0, 0)

    def quote(self, state):
        if state.hold:
            return state.hold_price
        return self.base.quote(state.base)

    def advance(self, state, accepted):
        fs = self.base
        if self.semantics == "literal":
            if state.hold:
                return state._replace(hold=state.hold - 1)
            if accepted:
                return PFSState(fs.advance(state.base, True), 0, 0.0, 0)
            if state.base.terminal:
                return state
            return PFSState(fs.advance(state.base, False), 0, fs.quote(state.base), self.r)
        if accepted:
            return PFSState(fs.advance(state.base, True), 0, 0.0, 0)
        if state.base.terminal:
            return state
        if state.rejections + 1 >= self.r:
            return PFSState(fs.advance(state.base, False), 0, 0.0, 0)
        return state._replace(rejections=state.rejections + 1)

    def node_step(self, state):
        if self.semantics == "literal" or state.base.terminal:
            return super().node_step(state)
        fs = self.base
        return (fs.quote(state.base),
                PFSState(fs.advance(state.base, True), 0, 0.0, 0),
                PFSState(fs.advance(state.base, False), 0, 0.0, 0),
                self.r - state.rejections)

    def constant_price(self, state):
        if state.hold:
            return None
        return self.base.constant_price(state.base)

    def price_floor(self, state):
        return state.base.a


class BisectionState(NamedTuple):
    lo: float
    hi: float


@dataclass(frozen=True)
class Bisection(SellerMachine):
    """Binary search on [0, 1]: quote the midpoint, keep the half that fits."""

    T: int
    kind: ClassVar[str] = "bisection"

    def initial_state(self):
        return BisectionState(0.0, 1.0)

    def quote(self, state):
        return 0.5 * (state.lo + state.hi)

    def advance(self, state, accepted):
        p = self.quote(state)
        return BisectionState(p, state.hi) if accepted else BisectionState(state.lo, p)

    def price_floor(self, state):
        return state.lo


@dataclass(frozen=True)
class SellerSpec:
    """Concrete seller description, as found in experiment configs."""

    kind: str
    beta: float | None = None
    prices: tuple[float, ...] | None = None
    r: int | None = None
    semantics: str = "strict"

    @classmethod
    def from_dict(cls, d: dict) -> "SellerSpec":
        d = dict(d)
        if d.get("prices") is not None:
            d["prices"] = tuple(d["prices"])
        return cls(**d)


def make_seller(spec, T: int) -> SellerMachine:
    """Build the machine named by ``spec`` (a SellerSpec, dict, or kind string)."""
    if isinstance(spec, str):
        spec = SellerSpec(spec)
    elif isinstance(spec, dict):
        spec = SellerSpec.from_dict(spec)
    if int(T) != T or T < 1:
        raise ValueError(f"T must be a positive integer, got {T!r}")
    T = int(T)
    kind = spec.kind
    if kind == "monotone":
        if spec.beta is None:
            raise ValueError("monotone seller needs beta")
        return MonotoneGeometric(T, float(spec.beta))
    if kind == "monotone-seq":
        if not spec.prices:
            raise ValueError("monotone-seq seller needs an explicit price list")
        if spec.prices[0] != 1.0:
            raise ValueError(f"explicit price sequences start at 1, got {spec.prices[0]!r}")
        return MonotoneSequence(T, tuple(spec.prices))
    if kind == "fast-search":
        return FastSearch(T)
    if kind == "pfs":
        if spec.r is None:
            raise ValueError("pfs seller needs r")
        return PenalizedFastSearch(T, spec.r, spec.semantics)
    if kind == "bisection":
        return Bisection(T)
    raise ValueError(f"unknown seller kind {kind!r}; expected one of {SELLER_KINDS}")


def is_convex_sequence(prices: Sequence[float], atol: float = 1e-12) -> bool:
    """Successive price drops never grow (within ``atol``)."""
    p = [float(x) for x in prices]
    for i in range(len(p) - 1):
        if p[i + 1] > p[i]:
            raise ValueError(f"sequence is not non-increasing at position {i + 2}")
    return all(p[i] - p[i + 1] >= p[i + 1] - p[i + 2] - atol for i in range(len(p) - 2))


def phase_bound(T: int) -> int:
    """``ceil(log2 log2 T) + 1`` computed with integers (1 for T <= 2)."""
    k = 0
    while 2 ** (2 ** k) < T:
        k += 1
    return k + 1


def ceil_log(T: int) -> int:
    """``ceil(ln T)``, at least 1."""
    return max(1, math.ceil(math.log(T)))


@dataclass(frozen=True)
class PhaseRecord:
    a: float
    b: float
    eps: float
    offered: int
    terminal: bool


def phase_log(machine: FastSearch | PenalizedFastSearch, decisions: Sequence[int]) -> list[PhaseRecord]:
    """Per-phase interval, increment and number of rounds spent there."""
    state = machine.initial_state()
    log: list[PhaseRecord] = []

    def base(s):
        return s.base if isinstance(s, PFSState) else s

    current = None
    for a in decisions:
        fs = base(state)
        key = (fs.a, fs.b, fs.eps, fs.terminal)
        if key != current:
            log.append(PhaseRecord(fs.a, fs.b, fs.eps, 0, fs.terminal))
            current = key
        last = log[-1]
        log[-1] = PhaseRecord(last.a, last.b, last.eps, last.offered + 1, last.terminal)
        state = machine.advance(state, bool(a))
    return log
