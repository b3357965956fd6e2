#!/usr/bin/env python3
"""Strict vs literal reading of the PFS penalty.

strict: a price is re-quoted until rejected r times in total.
literal: one rejection commits the seller to r more quotes of that price.
Both are played against the exact best response; the literal machine is
also checked for consistency of its per-round price tree.
"""
import argparse

from pplab.buyers import OptimalBuyer
from pplab.game import GameConfig, play_game, score_game
from pplab.sellers import PenalizedFastSearch
from pplab.trees import check_consistent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--gamma", type=float, nargs="+", default=[0.5, 0.8, 0.9])
    ap.add_argument("--v", type=float, default=0.7)
    ap.add_argument("--r", type=int, nargs="+", default=[1, 3, 5])
    args = ap.parse_args()

    print(f"{'T':>6} {'gamma':>6} {'r':>3} {'strict':>10} {'literal':>10} {'lies s/l':>9}")
    for T in args.T:
        for g in args.gamma:
            for r in args.r:
                cfg = GameConfig(T, g, args.v)
                res = []
                for sem in ("strict", "literal"):
                    m = PenalizedFastSearch(T, r, sem)
                    res.append(score_game(play_game(m, OptimalBuyer(m, cfg), cfg), cfg))
                print(f"{T:>6} {g:>6} {r:>3} {res[0].regret:>10.4f} {res[1].regret:>10.4f} "
                      f"{res[0].lie_count:>4}/{res[1].lie_count:<4}")
    for r in args.r:
        for sem in ("strict", "literal"):
            ok, why = check_consistent(PenalizedFastSearch(1024, r, sem), 10)
            print(f"r={r} {sem:<8} consistent at depth 10: {ok}" + ("" if ok else f" (node {why.path})"))


if __name__ == "__main__":
    main()
