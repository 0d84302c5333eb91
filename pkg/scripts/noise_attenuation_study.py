"""Noise gain of the zero-order estimator against window length and degree.

Zero signal plus seeded uniform noise.  For white noise the gain should be
close to sqrt(sum of squared taps), printed alongside as a check.
"""
import argparse
import math

import numpy as np

from gramdiff.runtime import build_taps
from gramdiff.signals import NoiseSpec
from gramdiff.simulate import SimulationConfig, run_simulation


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=20001)
    p.add_argument("--level", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--max-N", type=int, default=3)
    p.add_argument("--windows", default="10,25,50,100,200", help="T/dt ratios")
    args = p.parse_args()

    ratios = [int(r) for r in args.windows.split(",")]
    print(f"{'N':>2} {'T/dt':>6} {'gain':>9} {'predicted':>9}")
    for N in range(args.max_N + 1):
        for r in ratios:
            T = r * args.dt
            if r < N + 1:
                continue
            cfg = SimulationConfig(coeffs=(0.0,), noise=NoiseSpec("uniform", args.level, args.seed),
                                   N=N, j=0, dt=args.dt, T=T, n=args.n)
            gain = run_simulation(cfg)["noise_gain"]
            w = build_taps(N, 0, T, args.dt).weights
            print(f"{N:2d} {r:6d} {gain:9.4f} {math.sqrt(float(np.sum(w**2))):9.4f}")


if __name__ == "__main__":
    main()
