"""Named property suites behind ``pplab verify``.

Each suite only reads the other modules and returns a
:class:`~pplab.analysis.CheckReport`.  Default sizes are the ones the
acceptance tests use.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..analysis import (CheckReport, audit_rejections, closed_form_F, lemma3_monte_carlo,
                        lemma_numeric_checks, penalty_objective, pfs_upper_bound, r_star,
                        thm1_upper_bound)
from ..buyers import (BuyerSpec, OptimalBuyer, TruthfulBuyer, brute_force_best_response,
                      make_buyer, optimal_surplus)
from ..game import GameConfig, IntractableError, play_game, strategic_regret
from ..sellers import (Bisection, FastSearch, MonotoneGeometric, PenalizedFastSearch,
                       phase_bound)
from ..trees import check_consistent

GAMMAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
VALUES = tuple(round(0.05 * k, 2) for k in range(1, 20))
ORACLE_SELLERS = ("monotone", "fast-search", "pfs1", "pfs2", "pfs3", "bisection")


def random_small_machine(rng: np.random.Generator, T: int):
    kind = ORACLE_SELLERS[int(rng.integers(len(ORACLE_SELLERS)))]
    if kind == "monotone":
        return MonotoneGeometric(T, float(rng.uniform(0.2, 0.95)))
    if kind == "fast-search":
        return FastSearch(T)
    if kind == "bisection":
        return Bisection(T)
    return PenalizedFastSearch(T, int(kind[-1]))


def dp_oracle(n: int = 500, seed: int = 0, max_T: int = 12) -> CheckReport:
    """Memoized best response against exhaustive search on small games."""
    rng = np.random.default_rng(seed)
    rep = CheckReport()
    worst, bad = 0.0, []
    for _ in range(n):
        T = int(rng.integers(1, max_T + 1))
        cfg = GameConfig(T, GAMMAS[int(rng.integers(len(GAMMAS)))],
                         VALUES[int(rng.integers(len(VALUES)))])
        m = random_small_machine(rng, T)
        dp = optimal_surplus(m, cfg)
        bf, _ = brute_force_best_response(m, cfg)
        err = abs(dp - bf)
        worst = max(worst, err)
        if err > 1e-9:
            bad.append((repr(m), cfg))
    rep.add(f"dp surplus == brute force on {n} games (T <= {max_T})", not bad,
            f"max |diff| = {worst:.3g}" + (f"; first mismatch {bad[0]}" if bad else ""))
    return rep


def prop3(n: int = 100, seed: int = 0, max_T: int = 512) -> CheckReport:
    """Every first rejection of an optimal buyer against strict PFS meets the condition."""
    rng = np.random.default_rng(seed)
    rep = CheckReport()
    checked, bad = 0, []
    for _ in range(n):
        T = int(rng.integers(2, max_T + 1))
        cfg = GameConfig(T, float(rng.uniform(0.01, 0.99)), float(rng.uniform(0.0, 1.0)))
        m = PenalizedFastSearch(T, int(rng.integers(1, 6)))
        tr = play_game(m, OptimalBuyer(m, cfg), cfg)
        nodes = audit_rejections(m, tr.decisions, cfg)
        checked += len(nodes)
        bad += [(cfg, m.r, x) for x in nodes if not x.holds]
    rep.add(f"rejection condition at {checked} rejected nodes in {n} games", not bad,
            f"{len(bad)} violations" + (f", first {bad[0]}" if bad else ""))
    return rep


def random_decreasing_prices(rng: np.random.Generator) -> np.ndarray:
    """Non-increasing sequence from 1 down to a random end point in [0, 1/2]."""
    n = int(rng.integers(5, 400))
    drops = rng.exponential(size=n - 1)
    drops /= drops.sum()
    end = float(rng.uniform(0.0, 0.5))
    return 1.0 - (1.0 - end) * np.concatenate([[0.0], np.cumsum(drops)])


def lemma3(n: int = 20, samples: int = 10**5, seed: int = 0) -> CheckReport:
    rng = np.random.default_rng(seed)
    rep = CheckReport()
    worst = math.inf
    fails = []
    for i in range(n):
        prices = random_decreasing_prices(rng)
        res = lemma3_monte_carlo(prices, samples, seed=seed + i)
        worst = min(worst, res.product - 1 / 32 + 3 * res.stderr)
        if not res.holds:
            fails.append((i, res.product, res.stderr))
    rep.add(f"E[kappa] E[v - p] >= 1/32 - 3 se on {n} sequences x {samples} samples",
            not fails, f"smallest margin {worst:.4g}" + (f"; failures {fails[:3]}" if fails else ""))
    return rep


def lemma_numeric(points: int = 1000) -> CheckReport:
    return lemma_numeric_checks(points)


def rstar(n: int = 1000, seed: int = 0) -> CheckReport:
    rng = np.random.default_rng(seed)
    rep = CheckReport()
    gaps, bracket_bad, convex_bad = [], [], []
    for _ in range(n):
        g0 = float(rng.uniform(0.5, 1.0))
        if not 0.5 < g0 < 1.0:
            continue
        T = int(round(10 ** rng.uniform(math.log10(5), 6)))
        closed = r_star(g0, T, "closed-form")
        scan = r_star(g0, T, "scan")
        gaps.append(abs(closed.r_star - scan.r_star))
        F = closed.F_value
        if not 1.0 / (4 * T * math.log(2)) <= F <= 2.0 / T:
            bracket_bad.append((g0, T, F))
        f = penalty_objective(np.arange(1, 4 * scan.r_star + 3), g0, T)
        if np.any(np.diff(np.diff(f)) < -1e-9 * np.abs(f[2:])):
            convex_bad.append((g0, T))
    gaps = np.asarray(gaps)
    rep.add(f"scan and closed-form r* within 1 on {gaps.size} pairs", bool(np.all(gaps <= 1)),
            f"{int(np.count_nonzero(gaps))} differ by one, max gap {int(gaps.max(initial=0))}")
    rep.add("1/(4T log 2) <= F <= 2/T", not bracket_bad,
            f"{len(bracket_bad)} violations" + (f", first {bracket_bad[0]}" if bracket_bad else ""))
    rep.add("penalty objective convex over the scan range", not convex_bad,
            f"{len(convex_bad)} violations")
    ref = r_star(0.75, 100, "scan").r_star
    rep.add("r* = 17 at gamma0 = 0.75, T = 100", ref == 17, f"got {ref}")
    return rep


def consistency(depth: int = 12) -> CheckReport:
    rep = CheckReport()
    machines = [FastSearch(2 ** 16)] + [PenalizedFastSearch(2 ** 16, r) for r in (1, 2, 3, 5)]
    for m in machines:
        failures = []
        for d in range(1, depth + 1):
            ok, why = check_consistent(m, d)
            if not ok:
                failures.append((d, why))
        rep.add(f"{m!r} consistent at depths 1..{depth}", not failures,
                "" if not failures else f"first failure {failures[0]}")
    return rep


def _dp_or_grid(machine, cfg):
    try:
        return make_buyer(BuyerSpec("dp"), machine, cfg)
    except IntractableError:
        return make_buyer(BuyerSpec("grid"), machine, cfg)


PROP4_GRID = [(T, g, v, r)
              for T in (16, 64, 256, 1024, 4096)
              for g in (0.2, 0.5, 0.8, 0.9, 0.95)
              for v, r in ((0.3, 2), (0.9, 5))]


def prop4_dominance(grid=tuple(PROP4_GRID)) -> tuple[float, list]:
    worst, bad = 0.0, []
    for T, g, v, r in grid:
        m = PenalizedFastSearch(T, r)
        cfg = GameConfig(T, g, v)
        reg = strategic_regret(play_game(m, _dp_or_grid(m, cfg), cfg), cfg)
        bound = pfs_upper_bound(g, v, T, r)
        worst = max(worst, reg / bound)
        if reg > bound:
            bad.append((T, g, v, r, reg, bound))
    return worst, bad


def thm1_dominance(n: int = 25, seed: int = 0) -> tuple[float, list]:
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, []
    for _ in range(n):
        g0 = float(rng.uniform(0.55, 0.99))
        g = float(rng.uniform(0.5, g0))
        if not 0.5 < g < g0:
            continue
        v = float(rng.uniform(0.0, 1.0))
        T = int(2 ** rng.integers(6, 13))
        m = PenalizedFastSearch(T, r_star(g0, T).r_star)
        cfg = GameConfig(T, g, v)
        reg = strategic_regret(play_game(m, _dp_or_grid(m, cfg), cfg), cfg)
        bound = thm1_upper_bound(g0, v, T)
        worst = max(worst, reg / bound)
        if reg > bound:
            bad.append((T, g, g0, v, reg, bound))
    return worst, bad


def truthful_fast_search(exponents=range(4, 21),
                         values=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)) -> tuple[float, list]:
    worst, bad = 0.0, []
    for e in exponents:
        T = 2 ** e
        m = FastSearch(T)
        for v in values:
            cfg = GameConfig(T, 0.0, v)
            reg = strategic_regret(play_game(m, TruthfulBuyer(v), cfg), cfg)
            bound = (v + 1) * phase_bound(T)
            worst = max(worst, reg / bound)
            if reg > bound:
                bad.append((T, v, reg, bound))
    return worst, bad


def bound_dominance(seed: int = 0) -> CheckReport:
    rep = CheckReport()
    worst, bad = prop4_dominance()
    rep.add(f"PFS_r regret within its bound on {len(PROP4_GRID)} configs", not bad,
            f"max regret/bound {worst:.3f}" + (f"; first violation {bad[0]}" if bad else ""))
    worst, bad = thm1_dominance(seed=seed)
    rep.add("PFS_r* regret within its bound on 25 configs", not bad,
            f"max regret/bound {worst:.3f}" + (f"; first violation {bad[0]}" if bad else ""))
    worst, bad = truthful_fast_search()
    rep.add("truthful fast-search regret <= (v+1)(ceil(log2 log2 T)+1)", not bad,
            f"max regret/bound {worst:.3f}" + (f"; first violation {bad[0]}" if bad else ""))
    return rep


SUITES: dict[str, Callable[..., CheckReport]] = {
    "dp-oracle": dp_oracle,
    "prop3": prop3,
    "lemma3": lemma3,
    "lemma-numeric": lemma_numeric,
    "rstar": rstar,
    "consistency": consistency,
    "bound-dominance": bound_dominance,
}

# suites that take a seed / a size argument
SEEDED = {"dp-oracle", "prop3", "lemma3", "rstar", "bound-dominance"}
SIZED = {"dp-oracle": "n", "prop3": "n", "lemma3": "n", "rstar": "n",
         "lemma-numeric": "points", "consistency": "depth"}


def run_suite(name: str, seed: int | None = None, size: int | None = None) -> CheckReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    kw = {}
    if seed is not None and name in SEEDED:
        kw["seed"] = seed
    if size is not None and name in SIZED:
        kw[SIZED[name]] = size
    return SUITES[name](**kw)
