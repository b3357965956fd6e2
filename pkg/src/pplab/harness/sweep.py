"""Sweep runner: one game per (seller series, horizon) cell.

Cells are independent, so they may run in a process pool; rows are
re-sorted by (seller label, T) after the join and the output does not
depend on the number of workers.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

from ..analysis import pfs_upper_bound, prop1_lower, thm1_upper_bound
from ..buyers import BuyerSpec, GridBuyer, make_buyer
from ..game import GameConfig, IntractableError, play_game, score_game
from ..sellers import make_seller
from .config import ExperimentConfig, SellerEntry

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    seller: str
    buyer: str
    semantics: str
    T: int
    gamma: float
    gamma0: float | None
    v: float
    r: int | None
    beta: float | None
    grid_step: float | None
    revenue: float | None
    regret: float | None
    surplus: float | None
    kappa_star: int | None
    lie_count: int | None
    best_false_valuation: float | None
    bound_eq_reggamma: float | None
    bound_thm1: float | None
    lower_prop1: float | None
    wall_ms: float | None
    skipped: str | None = None    # reason; skipped rows are not written to CSV


CSV_FIELDS = tuple(f.name for f in fields(SweepRow) if f.name != "skipped")


def _buyer_for(config: ExperimentConfig, seller, game: GameConfig):
    spec = config.buyer
    try:
        return make_buyer(spec, seller, game), spec.kind
    except IntractableError as exc:
        if not spec.fallback:
            raise
        log.info("T=%d: %s; using the grid buyer", game.T, exc)
        grid = BuyerSpec("grid", grid_step=spec.grid_step)
        return make_buyer(grid, seller, game), f"{spec.kind}->grid"


def run_cell(config: ExperimentConfig, entry: SellerEntry, T: int) -> SweepRow:
    t0 = time.perf_counter()
    spec = entry.resolve(T, config.gamma, config.gamma0, config.semantics)
    seller = make_seller(spec, T)
    game = GameConfig(T, config.gamma, config.v)
    is_pfs = spec.kind in ("pfs", "fast-search")
    r = spec.r if spec.kind == "pfs" else (1 if spec.kind == "fast-search" else None)
    base = dict(
        seller=entry.label, semantics=spec.semantics if spec.kind == "pfs" else "",
        T=T, gamma=config.gamma, gamma0=config.gamma0, v=config.v, r=r,
        beta=spec.beta if spec.kind == "monotone" else None,
        bound_eq_reggamma=pfs_upper_bound(config.gamma, config.v, T, r) if is_pfs else None,
        bound_thm1=(thm1_upper_bound(config.gamma0, config.v, T)
                    if spec.kind == "pfs" and config.gamma0 is not None and T > 1 else None),
        lower_prop1=prop1_lower(T) if spec.kind.startswith("monotone") else None,
    )
    try:
        buyer, label = _buyer_for(config, seller, game)
    except IntractableError as exc:
        empty = {k: None for k in ("grid_step", "revenue", "regret", "surplus", "kappa_star",
                                   "lie_count", "best_false_valuation", "wall_ms")}
        return SweepRow(buyer=config.buyer.kind, skipped=str(exc), **base, **empty)
    out = score_game(play_game(seller, buyer, game), game)
    grid = isinstance(buyer, GridBuyer)
    return SweepRow(
        buyer=label,
        grid_step=buyer.step if grid else None,
        revenue=out.revenue, regret=out.regret, surplus=out.surplus,
        kappa_star=out.kappa_star, lie_count=out.lie_count,
        best_false_valuation=buyer.false_valuation if grid else None,
        wall_ms=(time.perf_counter() - t0) * 1e3 if config.timing else None,
        **base)


def _run_job(args):
    return run_cell(*args)


def worker_count(requested: int) -> int:
    cap = os.environ.get("PPLAB_THREADS")
    n = requested
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer PPLAB_THREADS=%r", cap)
    return max(1, n)


def run_sweep(config: ExperimentConfig) -> list[SweepRow]:
    jobs = [(config, entry, T) for entry in config.sellers for T in config.T]
    workers = min(worker_count(config.workers), max(len(jobs), 1))
    if workers <= 1:
        rows = [_run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_job, jobs))
    rows.sort(key=lambda row: (row.seller, row.T))
    return rows
