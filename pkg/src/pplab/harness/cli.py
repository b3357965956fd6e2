"""Command-line entry point: ``pplab {simulate,sweep,bounds,verify}``.

Exit status is 0 on success, 1 when a verification check fails and 2 on
usage or parameter errors.
"""
from __future__ import annotations

import argparse
import logging
import sys

from ..analysis import bound_report
from ..buyers import BUYER_KINDS, DEFAULT_GRID_STEP, BuyerSpec, GridBuyer, make_buyer
from ..game import ConfigurationError, GameConfig, IntractableError, play_game, score_game
from ..sellers import SELLER_KINDS, SEMANTICS, make_seller
from .config import AXES, SellerEntry, load_config
from .output import emit_csv, emit_plot
from .sweep import run_sweep
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"\n{self.prog}: error: {message}\n")


def _policy(text: str):
    """Number, integer, or a policy keyword."""
    aliases = {"logT": "ceil-log-T", "log-T": "ceil-log-T"}
    text = aliases.get(text, text)
    if text in ("auto", "ceil-log-T"):
        return text
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, 'auto' or 'ceil-log-T', got {text!r}")
    return int(x) if x.is_integer() and "." not in text else x


def _prices(text: str):
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated prices, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pplab", description="Posted-price auctions against strategic buyers.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="play one game and print the outcome")
    s.add_argument("--seller", choices=SELLER_KINDS, required=True)
    s.add_argument("--beta", type=_policy, help="monotone ratio or 'auto'")
    s.add_argument("--r", type=_policy, help="PFS penalty: integer, 'logT'/'ceil-log-T', or 'auto'")
    s.add_argument("--prices", type=_prices, help="explicit sequence for monotone-seq")
    s.add_argument("--semantics", choices=SEMANTICS, default="strict")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--gamma0", type=float)
    s.add_argument("--v", type=float, required=True)
    s.add_argument("--T", type=int, required=True)
    s.add_argument("--buyer", choices=[k for k in BUYER_KINDS if k != "scripted"], default="dp")
    s.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
    s.add_argument("--no-fallback", action="store_true",
                   help="fail instead of using the grid buyer when dp is intractable")
    s.add_argument("--transcript", action="store_true", help="print every round")

    w = sub.add_parser("sweep", help="run a JSON experiment config")
    w.add_argument("config")
    w.add_argument("--csv", help="override output.csv")
    w.add_argument("--svg", help="override output.svg")
    w.add_argument("--axes", choices=AXES)
    w.add_argument("--workers", type=int)
    w.add_argument("--seed", type=int)
    w.add_argument("--T", type=int, nargs="+", help="override the horizon list")
    w.add_argument("--timing", action="store_true", help="fill the wall_ms column")

    b = sub.add_parser("bounds", help="print the closed-form bounds")
    b.add_argument("--gamma", type=float, required=True)
    b.add_argument("--gamma0", type=float)
    b.add_argument("--v", type=float, required=True)
    b.add_argument("--T", type=int, required=True)
    b.add_argument("--r", type=int, default=1)
    b.add_argument("--C", type=float, default=1.0, help="constant of the log log T lower bound")

    f = sub.add_parser("verify", help="run a named property suite")
    f.add_argument("suite", choices=sorted(SUITES))
    f.add_argument("--seed", type=int)
    f.add_argument("--size", type=int, help="number of cases (or grid points / depth)")
    return p


def cmd_simulate(args) -> int:
    entry = SellerEntry(args.seller, args.seller, beta=args.beta, r=args.r,
                        prices=args.prices, semantics=args.semantics)
    if args.r == "auto" and args.gamma0 is None:
        raise UsageError("--r auto needs --gamma0")
    spec = entry.resolve(args.T, args.gamma, args.gamma0, args.semantics)
    seller = make_seller(spec, args.T)
    game = GameConfig(args.T, args.gamma, args.v)
    bspec = BuyerSpec(args.buyer, grid_step=args.grid_step)
    label = args.buyer
    try:
        buyer = make_buyer(bspec, seller, game)
    except IntractableError as exc:
        if args.no_fallback:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        logging.getLogger(__name__).info("%s; using the grid buyer", exc)
        buyer = make_buyer(BuyerSpec("grid", grid_step=args.grid_step), seller, game)
        label = f"{args.buyer}->grid"
    tr = play_game(seller, buyer, game)
    out = score_game(tr, game)
    print(f"seller      {seller!r}")
    print(f"buyer       {label}")
    if isinstance(buyer, GridBuyer):
        print(f"false v     {buyer.false_valuation:.6g}")
    print(f"revenue     {out.revenue:.12g}")
    print(f"regret      {out.regret:.12g}")
    print(f"surplus     {out.surplus:.12g}")
    print(f"kappa*      {out.kappa_star if out.kappa_star is not None else 'never'}")
    print(f"lies        {out.lie_count}")
    if args.transcript:
        for t, p, a in tr:
            print(f"{t:6d}  {p:.12g}  {'A' if a else 'R'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    cfg = cfg.override(csv=args.csv, svg=args.svg, axes=args.axes, workers=args.workers,
                       seed=args.seed, T=tuple(args.T) if args.T else None,
                       timing=True if args.timing else None)
    rows = run_sweep(cfg)
    for row in rows:
        if row.skipped:
            print(f"skipped {row.seller} T={row.T}: {row.skipped}", file=sys.stderr)
    if cfg.csv:
        emit_csv(rows, cfg.csv)
        print(f"wrote {cfg.csv} ({sum(r.skipped is None for r in rows)} rows)")
    if cfg.svg:
        emit_plot(rows, cfg.svg, cfg.axes, series=[s.label for s in cfg.sellers])
        print(f"wrote {cfg.svg}")
    if not cfg.csv and not cfg.svg:
        for row in rows:
            if row.skipped is None:
                print(f"{row.seller:>16}  T={row.T:<7d} buyer={row.buyer:<9} regret={row.regret:.6g}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    rep = bound_report(args.gamma, args.v, args.T, args.r, args.gamma0, args.C)
    sys.stdout.write(rep.as_text())
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, seed=args.seed, size=args.size)
    for line in rep.lines():
        print(line)
    print(f"{args.suite}: {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "bounds": cmd_bounds,
            "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigurationError, ValueError) as exc:
        print(f"pplab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pplab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
