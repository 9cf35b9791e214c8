"""Iteration counts and wall time of the Ahlfors solver versus grid size.

    python3 scripts/solver_scaling.py --n 2 --sizes 16,32,64,128
"""
import argparse
import time

import numpy as np

from ahlfors import SolveOptions, build_grid, solve_ahlfors
from ahlfors.laplacians import ahlfors_direct
from ahlfors.sampling import random_oneform


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--sizes", default="16,32,64")
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--tol", type=float, default=1e-10)
    args = ap.parse_args()

    for N in (int(s) for s in args.sizes.split(",")):
        m = build_grid(args.n, (N,) * args.n)
        b = ahlfors_direct(m, random_oneform(m, np.random.default_rng(0), kmax=args.kmax, zero_mean=True))
        for pre in (False, True):
            t0 = time.perf_counter()
            r = solve_ahlfors(m, b, SolveOptions(tol=args.tol, precondition=pre), raise_on_fail=False)
            print(f"N={N:<4} precondition={pre!s:<5} iterations={r.iterations:<5} "
                  f"residual={r.residual:.1e} time={time.perf_counter() - t0:.2f}s", flush=True)


if __name__ == "__main__":
    main()
