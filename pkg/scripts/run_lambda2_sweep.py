#!/usr/bin/env python3
"""Reproduce the second-exponent sweep (iid driver, 1e5 steps per point).

Writes out/sweep_iid.csv with the measured lambda2, jackknife error bars,
the two-state Markov reference and the -eps*E[a+b] prediction, plus the
fitted slope and the residual-scaling table as footer comments.

Takes a couple of minutes; pass --steps to trade accuracy for time.
"""

import argparse
import pathlib
import sys

from tentcocycle.experiments import main as cli


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--eps", default="0.04,0.02,0.01,0.005")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="out/sweep_iid.csv")
    args = ap.parse_args(argv)
    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    return cli([
        "sweep",
        "--eps", args.eps,
        "--driver", "iid_uniform(0,1,0,1)",
        "--steps", str(args.steps),
        "--seed", str(args.seed),
        "--backend", "exact",
        "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(run())
