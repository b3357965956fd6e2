"""Closed-form regret bounds, the optimal penalty length, and numeric checks.

``log`` is the natural logarithm throughout; base 2 appears only in the
phase count ``ceil(log2 log2 T) + 1`` (see :func:`pplab.sellers.phase_bound`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .buyers import OptimalBuyer, TruthfulBuyer
from .game import GameConfig, play_game, strategic_regret
from .sellers import MonotoneSequence, phase_bound
from .trees import node_increments

C_THM1 = 4.0 * math.log(2.0)


@dataclass(frozen=True)
class BoundReport:
    gamma: float
    gamma0: float | None
    v: float
    T: int
    r: int
    C: float
    T_gamma: float
    C_gamma: float
    phases: int
    eq_reggamma_bound: float
    thm1_bound: float | None
    prop1_lower: float
    prop6_lower: float
    kau_lower: float
    kl_lower: float
    corollary_lower: float
    thm1_applicable: bool
    prop6_applicable: bool

    def as_text(self) -> str:
        def fmt(x):
            return "n/a" if x is None else f"{x:.6g}"

        rows = [
            ("T_gamma", fmt(self.T_gamma)),
            ("C_gamma", fmt(self.C_gamma)),
            ("phases ceil(log2 log2 T)+1", str(self.phases)),
            (f"PFS_r upper bound (r={self.r})", fmt(self.eq_reggamma_bound)),
            ("PFS_r* upper bound", fmt(self.thm1_bound)
             + ("" if self.thm1_applicable else "  [inapplicable]")),
            ("monotone lower bound", fmt(self.prop1_lower)),
            ("convex monotone lower bound", fmt(self.prop6_lower)
             + ("" if self.prop6_applicable else "  [inapplicable]")),
            ("T_gamma/12 lower bound", fmt(self.kau_lower)),
            (f"C log log T lower bound (C={self.C:g})", fmt(self.kl_lower)),
            ("combined lower bound", fmt(self.corollary_lower)),
        ]
        head = f"gamma={self.gamma:g} gamma0={fmt(self.gamma0)} v={self.v:g} T={self.T} r={self.r}"
        width = max(len(k) for k, _ in rows)
        return head + "\n" + "\n".join(f"  {k:<{width}}  {val}" for k, val in rows) + "\n"


def pfs_upper_bound(gamma: float, v: float, T: int, r: int) -> float:
    """Regret bound of PFS_r for any valuation."""
    gr = gamma ** r
    return ((v * r + 1) * phase_bound(T)
            + (1 + gamma) * gr * T / (2 * (1 - gamma) * (1 - gr)))


def thm1_upper_bound(gamma0: float, v: float, T: int) -> float:
    """Regret bound of PFS_{r*} when gamma < gamma0."""
    Tg0 = 1.0 / (1.0 - gamma0)
    # uncapped log2 log2 T + 1, not the integer phase count
    phases = math.log2(math.log2(T)) + 1.0
    return (2 * v * gamma0 * Tg0 * math.log(C_THM1 * T) + 1 + v) * phases + 4 * Tg0


def prop1_lower(T: int) -> float:
    return 0.25 * math.sqrt(T - math.sqrt(T))


def prop6_lower(gamma: float, T: int) -> float:
    Tg = 1.0 / (1.0 - gamma)
    Cg = gamma / (2.0 * (1.0 - gamma))
    radicand = Cg * (T - math.sqrt(Tg * T)) * (0.5 - math.sqrt(Cg / T))
    return max(math.sqrt(T - math.sqrt(T)) / 8.0, math.sqrt(max(radicand, 0.0)))


def prop6_threshold(gamma: float) -> float:
    """Smallest horizon for which the convex-sequence lower bound is claimed."""
    if gamma <= 0.0:
        return math.inf
    return 1.0 / (1.0 - gamma) + 2.0 * math.log(2.0 / gamma) / math.log(1.0 / gamma)


def bound_report(gamma: float, v: float, T: int, r: int = 1,
                 gamma0: float | None = None, C: float = 1.0) -> BoundReport:
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    if T < 1 or r < 1:
        raise ValueError("T and r must be >= 1")
    if gamma0 is not None and not 0.0 < gamma0 < 1.0:
        raise ValueError(f"gamma0 must lie in (0, 1), got {gamma0!r}")
    Tg = 1.0 / (1.0 - gamma)
    kau = Tg / 12.0
    kl = C * math.log(math.log(T)) if T > math.e else 0.0
    kl = max(kl, 0.0)
    return BoundReport(
        gamma=gamma, gamma0=gamma0, v=v, T=T, r=r, C=C,
        T_gamma=Tg,
        C_gamma=gamma / (2.0 * (1.0 - gamma)),
        phases=phase_bound(T),
        eq_reggamma_bound=pfs_upper_bound(gamma, v, T, r),
        thm1_bound=None if gamma0 is None else thm1_upper_bound(gamma0, v, T),
        prop1_lower=prop1_lower(T),
        prop6_lower=prop6_lower(gamma, T),
        kau_lower=kau,
        kl_lower=kl,
        corollary_lower=max(kau, kl),
        thm1_applicable=gamma0 is not None and 0.5 < gamma < gamma0 < 1.0 and T > 4,
        prop6_applicable=gamma > 0.0 and T >= prop6_threshold(gamma),
    )


# -- optimal penalty length -------------------------------------------------

def penalty_objective(r, gamma0: float, T: int):
    """``r + gamma0**r T / ((1 - gamma0)(1 - gamma0**r))``; vectorized over r."""
    r = np.asarray(r, dtype=float)
    gr = np.power(gamma0, r)
    return r + gr * T / ((1.0 - gamma0) * (1.0 - gr))


def closed_form_F(gamma0: float, T: int) -> float:
    """``gamma0 ** rbar`` at the continuous minimizer, in cancellation-free form."""
    D = T * math.log(1.0 / gamma0) / (1.0 - gamma0)
    h = 2.0 + D
    return 2.0 / (h + math.sqrt(h * h - 4.0))


@dataclass(frozen=True)
class RStarResult:
    r_star: int
    r_bar_star: float
    F_value: float
    method: str


def r_star(gamma0: float, T: int, method: str = "closed-form") -> RStarResult:
    if method not in ("scan", "closed-form"):
        raise ValueError(f"unknown method {method!r}")
    if not 0.0 < gamma0 < 1.0:
        raise ValueError(f"gamma0 must lie in (0, 1), got {gamma0!r}")
    if method == "closed-form" and not (0.5 < gamma0 and T > 4):
        raise ValueError("closed form needs 1/2 < gamma0 < 1 and T > 4")
    if T < 1:
        raise ValueError("T must be >= 1")
    F = closed_form_F(gamma0, T)
    rbar = math.log(F) / math.log(gamma0)
    if method == "closed-form":
        return RStarResult(max(1, math.ceil(rbar)), rbar, F, method)
    # gamma0**r_max < 1/T**2: the objective is within 1/T of r beyond here
    r_max = max(2, math.ceil(2.0 * math.log(max(T, 2)) / math.log(1.0 / gamma0)) + 1)
    rs = np.arange(1, r_max + 1)
    f = penalty_objective(rs, gamma0, T)
    return RStarResult(int(rs[int(np.argmin(f))]), rbar, F, method)


def rejection_condition(v: float, p_n: float, delta_l: float, delta_r: float,
                        gamma: float, r: int) -> bool:
    """Necessary condition for an optimal buyer to reject ``p_n``."""
    coef = gamma ** r / ((1.0 - gamma) * (1.0 - gamma ** r))
    return v - p_n < coef * (delta_l + gamma * delta_r)


@dataclass(frozen=True)
class RejectedNode:
    t: int
    depth: int
    price: float
    delta_l: float
    delta_r: float
    holds: bool


def audit_rejections(machine, decisions: Sequence[int], config: GameConfig) -> list[RejectedNode]:
    """Check the rejection condition at every node the buyer first rejected.

    Increments are read from the unpenalized tree of height T: the left
    subtree of a node at tree depth ``d`` has ``T - d`` levels.
    """
    out = []
    state = machine.initial_state()
    depth = 1
    penalty = getattr(machine, "r", 1)
    for t, a in enumerate(decisions, start=1):
        fresh = getattr(state, "rejections", 0) == 0 and not getattr(state, "hold", 0)
        if not a and fresh and machine.constant_price(state) is None:
            dr, dl = node_increments(machine, state, config.T - depth)
            p = machine.quote(state)
            out.append(RejectedNode(t, depth, p, dl, dr,
                                    rejection_condition(config.v, p, dl, dr, config.gamma, penalty)))
        nxt = machine.advance(state, bool(a))
        if getattr(nxt, "base", nxt) != getattr(state, "base", state):
            depth += 1
        state = nxt
    return out


# -- appendix checks ----------------------------------------------------------

def g_ratio(gamma):
    """``log(1/gamma) / (1 - gamma)``."""
    gamma = np.asarray(gamma, dtype=float)
    return -np.log(gamma) / (1.0 - gamma)


@dataclass
class CheckReport:
    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.entries.append((name, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def lines(self) -> list[str]:
        return [f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {d}" if d else "")
                for name, ok, d in self.entries]


def lemma_numeric_checks(points: int = 1000, lo: float = 0.01, hi: float = 0.99,
                         horizons: Sequence[int] = (5, 10, 100, 1000, 10**6),
                         bracket_pairs: Sequence[tuple[float, int]] | None = None) -> CheckReport:
    if points < 10:
        raise ValueError("grid resolution must be at least 10 points")
    rep = CheckReport()
    grid = np.linspace(lo, hi, points)
    g = g_ratio(grid)
    bad = np.flatnonzero(np.diff(g) >= 0)
    rep.add(f"log(1/g)/(1-g) strictly decreasing on {points} points in [{lo}, {hi}]",
            bad.size == 0, "" if bad.size == 0 else f"first failure at gamma={grid[bad[0]]:.6g}")

    g0 = np.linspace(0.5 + 1e-6, hi, points)
    for T in horizons:
        F = np.array([closed_form_F(x, T) for x in g0])
        bad = np.flatnonzero(np.diff(F) <= 0)
        rep.add(f"F(gamma0) increasing on (1/2, {hi}] at T={T}", bad.size == 0,
                "" if bad.size == 0 else f"first failure at gamma0={g0[bad[0]]:.6g}")

    if bracket_pairs is None:
        bracket_pairs = [(x, T) for x in (0.51, 0.6, 0.75, 0.9, 0.99, 0.999)
                         for T in (5, 10, 100, 1000, 10**4, 10**6)]
    fails = []
    for gamma0, T in bracket_pairs:
        F = closed_form_F(gamma0, T)
        if not 1.0 / (4 * T * math.log(2)) <= F <= 2.0 / T:
            fails.append((gamma0, T, F))
    rep.add(f"1/(4T log 2) <= F <= 2/T on {len(bracket_pairs)} (gamma0, T) pairs",
            not fails, "" if not fails else f"violations: {fails[:3]}")
    return rep


@dataclass(frozen=True)
class Lemma3Report:
    samples: int
    mean_kappa: float
    mean_gap: float
    product: float
    stderr: float
    exact_kappa: float
    exact_gap: float
    holds: bool

    @property
    def exact_product(self) -> float:
        return self.exact_kappa * self.exact_gap


def _acceptance_index(prices: np.ndarray, v: np.ndarray) -> np.ndarray:
    # number of prices strictly above v, +1; prices are non-increasing
    return np.searchsorted(-prices, -v, side="left") + 1


def lemma3_exact(prices: Sequence[float]) -> tuple[float, float]:
    """E[kappa*] and E[v - p_kappa*] for v ~ U[1/2, 1] and a truthful buyer."""
    p = np.asarray(prices, dtype=float)
    e_kappa = e_gap = 0.0
    upper = 1.0
    for i, pk in enumerate(p.tolist()):
        lo_v = max(pk, 0.5)
        if upper > lo_v:
            w = 2.0 * (upper - lo_v)
            e_kappa += (i + 1) * w
            e_gap += (upper - lo_v) * ((upper + lo_v) - 2 * pk)  # 2 * integral of (v - pk)
        upper = min(upper, pk)
        if upper <= 0.5:
            break
    return e_kappa, e_gap


def lemma3_monte_carlo(prices: Sequence[float], samples: int = 10**5, seed: int = 0) -> Lemma3Report:
    """Monte-Carlo estimate of E[kappa*] * E[v - p_kappa*] for v ~ U[1/2, 1]."""
    p = np.asarray(prices, dtype=float)
    if p.size == 0 or np.any(np.diff(p) > 0):
        raise ValueError("prices must be a non-empty non-increasing sequence")
    if p[-1] > 0.5:
        raise ValueError("the sequence must reach 1/2 so every v in [1/2, 1] accepts")
    if samples < 10**4:
        raise ValueError("use at least 10**4 samples")
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.5, 1.0, samples)
    kappa = _acceptance_index(p, v)
    gap = v - p[kappa - 1]
    mk, mg = kappa.mean(), gap.mean()
    cov = np.cov(np.vstack([kappa, gap]))
    var_prod = (mg ** 2 * cov[0, 0] + mk ** 2 * cov[1, 1] + 2 * mk * mg * cov[0, 1]) / samples
    se = math.sqrt(max(var_prod, 0.0))
    ek, eg = lemma3_exact(p)
    return Lemma3Report(samples, float(mk), float(mg), float(mk * mg), se, ek, eg,
                        holds=bool(mk * mg >= 1.0 / 32.0 - 3.0 * se))


def lemma3_play_check(prices: Sequence[float], v: float) -> int | None:
    """kappa* from actually playing the explicit-sequence machine truthfully."""
    machine = MonotoneSequence(len(prices), tuple(prices))
    tr = play_game(machine, TruthfulBuyer(v), GameConfig(len(prices), 0.0, v))
    hits = np.flatnonzero(tr.accepted)
    return int(hits[0]) + 1 if hits.size else None


class WorstCase(NamedTuple):
    v0: float
    regret: float
    diagnostics: dict


def worst_case_valuation(seller, T: int, gamma: float, buyer_kind: str,
                         v_grid: Sequence[float]) -> WorstCase:
    """Valuation on ``v_grid`` that maximizes the seller's strategic regret."""
    if seller.T != T:
        raise ValueError(f"seller was built for T={seller.T}, asked for T={T}")
    if buyer_kind not in ("truthful", "dp"):
        raise ValueError("buyer_kind must be 'truthful' or 'dp'")
    best = None
    kappa = {}
    for v in v_grid:
        cfg = GameConfig(T, gamma, float(v))
        buyer = TruthfulBuyer(v) if buyer_kind == "truthful" else OptimalBuyer(seller, cfg)
        tr = play_game(seller, buyer, cfg)
        reg = strategic_regret(tr, cfg)
        hits = np.flatnonzero(tr.accepted)
        kappa[float(v)] = int(hits[0]) + 1 if hits.size else None
        if best is None or reg > best[1]:
            best = (float(v), reg)
    diag = {"kappa_min": kappa.get(max(kappa)), "kappa_max": kappa.get(min(kappa))}
    return WorstCase(best[0], best[1], diag)
