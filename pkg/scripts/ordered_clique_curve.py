"""Ordered-clique exact recovery rate (p=1, q=1/2) against c = k / sqrt(n).

Example: python scripts/ordered_clique_curve.py --n 900 --trials 20
"""

import argparse
import math

import numpy as np

from prs.model import ModelParams, mix_seed, sample_planted
from prs.recover import ordered_clique_recover


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=900)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--c", type=float, nargs="+", default=[2, 3, 4, 5, 6, 8, 10])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    n = args.n
    print(f"{'c':>5} {'k':>7} {'exact rate':>11} {'failures':>9}")
    for i, c in enumerate(args.c):
        k = c * math.sqrt(n)
        if k > n:
            continue
        params = ModelParams(n, k, 1.0, 0.5)
        wins = fails = 0
        for t in range(args.trials):
            inst = sample_planted(params, mix_seed(args.seed, i, t))
            est = ordered_clique_recover(inst.graph, k, seed=mix_seed(args.seed, i, t, 1))
            fails += est.failed
            wins += (not est.failed) and np.array_equal(est.order, inst.order)
        print(f"{c:>5g} {k:>7.1f} {wins / args.trials:>11.2f} {fails:>9d}")


if __name__ == "__main__":
    main()
