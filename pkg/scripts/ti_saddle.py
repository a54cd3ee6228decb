#!/usr/bin/env python3
"""Time-reversal-invariant bilayer: protected saddle and noise-assisted escape.

A layer at flux p/q stacked with its conjugate at -p/q forms a
time-reversal-invariant insulator.  Its bare Markov gap is twice the
single-layer value.  Restricted to TR-symmetric smoothers the descent
converges to (2/3) log 2 -- the doubled topological value -- and stays
there: the constraint protects the saddle.  Unconstrained descent reaches
the same plateau, stalls, and only random TR-breaking kicks carry it
below, revealing that the plateau is a saddle rather than a minimum for
the unconstrained problem.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from markovgap.config import parse_config
from markovgap.driver import execute_run

LOG2 = np.log(2.0)


def build(args, *, tr_constrained, max_iters, tag):
    return parse_config({
        "seed": args.seed,
        "model": {"kind": "ti", "p": 1, "q": 4},
        "geometry": {"width": 36, "height": 28, "l_a": 10, "l_b": 10,
                     "shape": "two_circles", "radius": args.radius},
        "optimizer": {"max_iters": max_iters,
                      "tr_constrained": tr_constrained},
        "output": {"dir": f"{args.out}/{tag}"},
    })


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=int, default=4)
    ap.add_argument("--max-iters", type=int, default=600)
    ap.add_argument("--free-max-iters", type=int, default=1200)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--out", default="out/ti_saddle")
    ap.add_argument("--skip-free", action="store_true",
                    help="only run the TR-constrained descent")
    args = ap.parse_args()

    print(f"bilayer L = 10 on 36x28, R = {args.radius}")
    print(f"(2/3) log 2 = {2 * LOG2 / 3:.4f}\n")

    constrained = execute_run(build(args, tr_constrained=True,
                                    max_iters=args.max_iters, tag="tr"))
    print(f"bare h            = {constrained.bare_h:.4f} "
          f"(= 2 x single layer)")
    rep = constrained.report
    print(f"TR-constrained    = {constrained.final_h:.4f} "
          f"after {rep.iterations} iters ({rep.reason})")

    if args.skip_free:
        return

    free = execute_run(build(args, tr_constrained=False,
                             max_iters=args.free_max_iters, tag="free"))
    rep = free.report
    kicks = len(rep.saddle_events)
    trace = rep.trace_array()
    near = np.abs(trace[:, 1] - 2 * LOG2 / 3) < 0.05
    print(f"unconstrained     = {free.final_h:.4f} "
          f"after {rep.iterations} iters ({rep.reason}, {kicks} noise kicks)")
    print(f"plateau visits near (2/3) log 2: {int(near.sum())} iterations")


if __name__ == "__main__":
    main()
