"""Buyer decision policies and the exact best response.

A policy answers ``decide(t, price, history) -> bool`` where ``history`` is
the list of the buyer's own previous decisions.  Policies that decide from
the price alone set ``stationary = True``.

The optimal buyer runs backward induction over ``(seller state, round)``
on the node-level tree of the announced machine.  Values are stored
normalised to the node's own round, ``W = S / gamma**(t-1)``, so long
horizons do not underflow:

    W(n, t) = max(v - p_n + gamma * W(r(n), t + 1),
                  gamma**k * W(l(n), t + k))          k = reject rounds

Ties go to acceptance.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .game import ConfigurationError, GameConfig, IntractableError, play_game
from .game import discounted_surplus

BUYER_KINDS = ("truthful", "dp", "grid", "brute-force", "scripted")
DEFAULT_DP_CAP = 2_000_000
BRUTE_FORCE_MAX_T = 20
DEFAULT_GRID_STEP = 0.03


class TruthfulBuyer:
    """Accepts exactly when the price is at most ``v`` (ties accept)."""

    kind = "truthful"
    stationary = True

    def __init__(self, v: float):
        self.v = float(v)

    def decide(self, t, price, history):
        return price <= self.v


class GridBuyer(TruthfulBuyer):
    """Plays truthfully for the false valuation that serves the buyer best."""

    kind = "grid"

    def __init__(self, v: float, false_valuation: float, surplus: float, step: float):
        super().__init__(false_valuation)
        self.true_v = float(v)
        self.false_valuation = float(false_valuation)
        self.surplus = surplus
        self.step = step


class ScriptedBuyer:
    kind = "scripted"
    stationary = False

    def __init__(self, decisions: Sequence[int]):
        self.decisions = tuple(int(bool(a)) for a in decisions)

    def decide(self, t, price, history):
        return bool(self.decisions[t - 1])


@dataclass(frozen=True)
class ValueFunctionEntry:
    state: object
    t: int
    value: float      # optimal discounted surplus from round t on, S(n)
    accept: bool


class ValueFunction:
    """Memoized optimal surplus for one (machine, config) pair."""

    def __init__(self, machine, config: GameConfig, cap: int = DEFAULT_DP_CAP):
        if not getattr(machine, "canonical_states", False):
            raise ConfigurationError(
                f"{type(machine).__name__} has no canonical state encoding; "
                "exact best response needs one")
        if machine.T != config.T:
            raise ConfigurationError(
                f"seller was built for T={machine.T} but the game has T={config.T}")
        self.machine = machine
        self.config = config
        self.cap = cap
        self._memo: dict = {}

    def _shortcut(self, state, t):
        """(W, accept) without expansion, or None."""
        v, g = self.config.v, self.config.gamma
        cp = self.machine.constant_price(state)
        if cp is not None:
            m = self.config.T - t + 1
            if cp <= v:
                return (v - cp) * (1.0 - g ** m) / (1.0 - g), True
            return 0.0, False
        floor = self.machine.price_floor(state)
        if floor is not None and floor >= v:
            # nothing below v is ever offered again
            return 0.0, self.machine.quote(state) <= v
        return None

    def _known(self, state, t):
        if t > self.config.T:
            return 0.0
        hit = self._memo.get((state, t))
        if hit is not None:
            return hit[0]
        cut = self._shortcut(state, t)
        return None if cut is None else cut[0]

    def _solve(self, state, t):
        memo = self._memo
        v, g = self.config.v, self.config.gamma
        step = self.machine.node_step
        known = self._known
        stack = [(state, t, None)]
        while stack:
            s, u, info = stack[-1]
            if (s, u) in memo:
                stack.pop()
                continue
            if info is None:
                info = step(s)
                stack[-1] = (s, u, info)
            price, acc, rej, k = info
            wa = known(acc, u + 1)
            wr = known(rej, u + k)
            if wa is None or wr is None:
                if wa is None:
                    stack.append((acc, u + 1, None))
                if wr is None:
                    stack.append((rej, u + k, None))
                continue
            take = v - price + g * wa
            leave = g ** k * wr
            memo[(s, u)] = (take, True) if take >= leave else (leave, False)
            stack.pop()
            if len(memo) > self.cap:
                raise IntractableError(
                    f"best response needs more than {self.cap} (state, round) entries "
                    f"for {type(self.machine).__name__} at T={self.config.T}; "
                    "use the grid false-valuation buyer instead")

    def lookup(self, state, t) -> tuple[float, bool]:
        """Normalised value and chosen action at ``state`` in round ``t``."""
        cut = self._shortcut(state, t)
        if cut is not None:
            return cut
        if (state, t) not in self._memo:
            self._solve(state, t)
        return self._memo[(state, t)]

    @property
    def surplus(self) -> float:
        return self.lookup(self.machine.initial_state(), 1)[0]

    def __len__(self):
        return len(self._memo)

    def entries(self) -> list[ValueFunctionEntry]:
        g = self.config.gamma
        return [ValueFunctionEntry(s, t, w * g ** (t - 1), a)
                for (s, t), (w, a) in self._memo.items()]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["state", "round", "value", "accept"])
            for e in sorted(self.entries(), key=lambda e: (e.t, repr(e.state))):
                w.writerow([repr(tuple(e.state)), e.t, f"{e.value:.12g}", int(e.accept)])


class OptimalBuyer:
    """Exact best response to the announced machine."""

    kind = "dp"
    stationary = False

    def __init__(self, machine, config: GameConfig, cap: int = DEFAULT_DP_CAP):
        self.machine = machine
        self.config = config
        self.T = config.T
        self.values = ValueFunction(machine, config, cap)
        self.surplus = self.values.surplus
        self._track = None   # (history list, length, seller state)
        self._plan = None    # (history list, last committed round, history index)

    def _seller_state(self, history):
        track = self._track
        n = len(history)
        if track is not None and track[0] is history and track[1] == n - 1:
            state = self.machine.advance(track[2], history[-1])
        elif track is not None and track[0] is history and track[1] == n:
            state = track[2]
        else:
            state = self.machine.initial_state()
            for a in history:
                state = self.machine.advance(state, a)
        self._track = (history, n, state)
        return state

    def decide(self, t, price, history):
        state = self._seller_state(history)
        if self.machine.quote(state) != price:
            raise ConfigurationError(
                f"round {t}: seller quoted {price!r} but the announced machine says "
                f"{self.machine.quote(state)!r}")
        plan = self._plan
        if plan is not None and plan[0] is history and t <= plan[1] and not any(history[plan[2]:]):
            # still inside a multi-round rejection edge chosen earlier
            return False
        accept = self.values.lookup(state, t)[1]
        if not accept:
            rounds = self.machine.node_step(state)[3]
            self._plan = (history, t + rounds - 1, len(history))
        return accept


def brute_force_best_response(machine, config: GameConfig) -> tuple[float, tuple[int, ...]]:
    """Exhaustive search over all 2**T decision sequences (shared prefixes).

    Uses only ``quote``/``advance``.  Among equal surpluses the sequence that
    accepts at the earliest differing round wins.
    """
    T = config.T
    if T > BRUTE_FORCE_MAX_T:
        raise IntractableError(f"brute force refused for T={T} > {BRUTE_FORCE_MAX_T}")
    if machine.T != T:
        raise ConfigurationError(f"seller was built for T={machine.T}, game has T={T}")
    v = config.v
    disc = config.discounts().tolist()
    best = [None, None]
    path: list[int] = []

    def visit(state, t, acc):
        if t == T:
            if best[0] is None or acc > best[0]:
                best[0], best[1] = acc, tuple(path)
            return
        p = machine.quote(state)
        path.append(1)
        visit(machine.advance(state, True), t + 1, acc + disc[t] * (v - p))
        path[-1] = 0
        visit(machine.advance(state, False), t + 1, acc)
        path.pop()

    visit(machine.initial_state(), 0, 0.0)
    return best[0], best[1]


def optimal_surplus(machine, config: GameConfig, cap: int = DEFAULT_DP_CAP) -> float:
    return ValueFunction(machine, config, cap).surplus


def false_valuation_grid(v: float, step: float) -> list[float]:
    """``{step, 2*step, ...}`` up to ``v``, plus ``v`` itself."""
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step!r}")
    n = int(v / step + 1e-9)
    pts = {round(k * step, 12) for k in range(1, n + 1)}
    pts = {p for p in pts if p <= v}
    pts.add(v)
    return sorted(pts)


def best_false_valuation(machine, config: GameConfig,
                         step: float = DEFAULT_GRID_STEP) -> tuple[float, float]:
    """False valuation (played truthfully) maximizing the true discounted surplus.

    Ties go to the largest candidate.
    """
    best_v, best_s = None, None
    for vhat in reversed(false_valuation_grid(config.v, step)):
        tr = play_game(machine, TruthfulBuyer(vhat), config)
        s = discounted_surplus(tr, config)
        if best_s is None or s > best_s:
            best_v, best_s = vhat, s
    return best_v, best_s


@dataclass(frozen=True)
class BuyerSpec:
    kind: str = "truthful"
    grid_step: float = DEFAULT_GRID_STEP
    decisions: tuple[int, ...] | None = None
    dp_cap: int = DEFAULT_DP_CAP
    fallback: bool = True   # harness: substitute the grid buyer when dp is intractable

    @classmethod
    def from_dict(cls, d: dict) -> "BuyerSpec":
        d = dict(d)
        if d.get("decisions") is not None:
            d["decisions"] = tuple(d["decisions"])
        return cls(**d)


def make_buyer(spec, seller, config: GameConfig):
    if isinstance(spec, str):
        spec = BuyerSpec(spec)
    elif isinstance(spec, dict):
        spec = BuyerSpec.from_dict(spec)
    kind = spec.kind
    if kind == "truthful":
        return TruthfulBuyer(config.v)
    if kind == "dp":
        return OptimalBuyer(seller, config, spec.dp_cap)
    if kind == "grid":
        if spec.grid_step <= 0:
            raise ValueError(f"grid step must be positive, got {spec.grid_step!r}")
        vhat, s = best_false_valuation(seller, config, spec.grid_step)
        return GridBuyer(config.v, vhat, s, spec.grid_step)
    if kind == "brute-force":
        _, decisions = brute_force_best_response(seller, config)
        return ScriptedBuyer(decisions)
    if kind == "scripted":
        if spec.decisions is None or len(spec.decisions) != config.T:
            raise ValueError("scripted buyer needs exactly T decisions")
        return ScriptedBuyer(spec.decisions)
    raise ValueError(f"unknown buyer kind {kind!r}; expected one of {BUYER_KINDS}")
