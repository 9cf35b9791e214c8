"""Identity errors against grid size and conformal amplitude.

    python3 scripts/identity_sweep.py --n 3 --sizes 16,24,32 --amps 0,0.1,0.3
"""
import argparse
import json

import numpy as np

from ahlfors import Conformal, build_grid, verify_identities


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--sizes", default="16,32,64")
    ap.add_argument("--amps", default="0,0.1,0.3")
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    rows = []
    for amp in (float(a) for a in args.amps.split(",")):
        for N in (int(s) for s in args.sizes.split(",")):
            spec = Conformal(lambda *c, a=amp: a * np.cos(c[0]) + 0.5 * a * np.sin(c[1]), amp=amp)
            m = build_grid(args.n, (N,) * args.n, spec)
            rep = verify_identities(m, seed=args.seed, samples=args.samples)
            rows.append({"amp": amp, "N": N, **rep.errors})
            print(f"amp={amp:<5} N={N:<4} worst={rep.max_error():.2e}", flush=True)
    print(json.dumps(rows, indent=1))


if __name__ == "__main__":
    main()
