#!/usr/bin/env python3
"""Dump the price tree of a seller machine as Graphviz DOT or indented text."""
import argparse
import sys

from pplab.sellers import SELLER_KINDS, SellerSpec, make_seller
from pplab.trees import price_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seller", choices=SELLER_KINDS, default="pfs")
    ap.add_argument("--T", type=int, default=16)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--format", choices=("dot", "text"), default="dot")
    ap.add_argument("-o", "--output", help="file to write (default stdout)")
    args = ap.parse_args()

    spec = SellerSpec(args.seller, beta=args.beta, r=args.r)
    tree = price_tree(make_seller(spec, args.T), args.depth)
    text = tree.to_dot() if args.format == "dot" else tree.to_text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
