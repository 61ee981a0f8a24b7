"""Ranking By Wins on a tournament (p=1, k=n): normalised Kendall tau error against c = q sqrt(n).

Example: python scripts/rbw_error_curve.py --n 2000 --trials 10
"""

import argparse
import math

import numpy as np

from prs.metrics import kendall_tau
from prs.model import ModelParams, mix_seed, sample_planted
from prs.recover import ranking_by_wins


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--c", type=float, nargs="+", default=[0.1, 0.25, 0.5, 1, 2, 4, 8, 16])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    n = args.n
    pairs = math.comb(n, 2)
    print(f"{'c':>6} {'q':>8} {'mean KT/C(n,2)':>15} {'c * KT':>8}")
    for i, c in enumerate(args.c):
        q = c / math.sqrt(n)
        if q > 0.5:
            continue
        params = ModelParams(n, n, 1.0, q)
        errs = []
        for t in range(args.trials):
            inst = sample_planted(params, mix_seed(args.seed, i, t))
            errs.append(kendall_tau(ranking_by_wins(inst.graph), inst.order) / pairs)
        print(f"{c:>6g} {q:>8.4f} {np.mean(errs):>15.4f} {c * np.mean(errs):>8.4f}")


if __name__ == "__main__":
    main()
