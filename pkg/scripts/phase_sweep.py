"""Log-density sweep over (alpha, beta) at fixed gamma; prints the detection error grid.

Example: python scripts/phase_sweep.py --n 400 --steps 5 --trials 20 --out results/phase
"""

import argparse
import json
import math

from prs.harness import SweepConfig, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[400])
    ap.add_argument("--steps", type=int, default=5)
    ap.add_argument("--gamma", type=float, default=0.0)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--algos", default="degree2,spectral")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/phase")
    args = ap.parse_args()
    # q = n^-alpha must stay <= 1/2 at the smallest n
    lo = math.log(2) / math.log(min(args.n))
    config = SweepConfig.from_dict({
        "alpha": {"min": math.ceil(lo * 1e6) / 1e6, "max": 1.0, "steps": args.steps},
        "beta": {"min": 0.5, "max": 1.0, "steps": args.steps},
        "gamma": args.gamma, "n": args.n, "trials": args.trials,
        "algorithms": args.algos.split(","), "base_seed": args.seed,
        "workers": args.workers, "output": args.out,
    })
    csv_path, json_path = run_sweep(config)
    cells = json.loads(json_path.read_text())["cells"]
    print(f"{'algorithm':>10} {'n':>6} {'alpha':>6} {'beta':>6} {'total_error':>12}")
    for c in cells:
        err = "n/a" if c["total_error"] is None else f"{c['total_error']:.3f}"
        print(f"{c['algorithm']:>10} {c['n']:>6} {c['alpha']:>6.3f} {c['beta']:>6.3f} {err:>12}")
    print(f"wrote {csv_path} and {json_path}")


if __name__ == "__main__":
    main()
