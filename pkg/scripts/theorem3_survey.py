"""Fitted coefficient of the momentum-constraint integral identity over random data.

Prints the fitted c for each instance next to (n-1)/n and (n+1)/n.

    python3 scripts/theorem3_survey.py --n 3 --shape 16 --count 10
"""
import argparse

import numpy as np

from ahlfors import build_grid, gen_momentum_data, theorem3_check
from ahlfors.sampling import random_scalar, random_tt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--shape", type=int, default=32)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n = args.n
    m = build_grid(n, (args.shape,) * n)
    rng = np.random.default_rng(args.seed)
    print(f"{'#':>3} {'int xi(H)':>14} {'rhs':>14} {'fitted c':>12} {'(n-1)/n':>9} {'(n+1)/n':>9}")
    cs = []
    for i in range(args.count):
        f = random_scalar(m, rng, kmax=args.kmax)
        K, _ = gen_momentum_data(m, f, float(rng.uniform(-1, 1)), random_tt(m, rng, kmax=args.kmax))
        rep = theorem3_check(m, K)
        cs.append(rep.fitted_c)
        print(f"{i:3d} {rep.lie_integral:14.6e} {rep.rhs_derived:14.6e} {rep.fitted_c:12.9f} "
              f"{rep.derived_coefficient:9.6f} {rep.alt_coefficient:9.6f}")
    cs = np.array(cs)
    print(f"mean c = {cs.mean():.12f}, spread = {cs.max() - cs.min():.2e}")


if __name__ == "__main__":
    main()
