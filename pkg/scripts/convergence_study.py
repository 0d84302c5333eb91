"""Discretization error of the moving-horizon differentiator versus sample step.

Polynomial inputs of degree <= N are reproduced exactly by the continuous
estimator, so every bit of error here comes from treating the samples as a
piecewise-linear signal.  The guaranteed rate is O(dt**2); on the cubic the
leading term cancels and the ratio per halving is close to 16.  On the sine
the model mismatch of the window dominates and the error levels off.
"""
import argparse

import numpy as np

from gramdiff.kernels import KernelSpec
from gramdiff.runtime import differentiate_series
from gramdiff.signals import gen_polynomial, gen_sine, poly_derivative, sine_derivative


def max_error(signal, N, j, T, dt, span):
    n = int(round(span / dt)) + 1
    if signal == "cubic":
        coeffs = [0.3, -1.0, 0.5, 6.0]
        s = gen_polynomial(coeffs, 0.0, dt, n)
        truth = lambda t: poly_derivative(coeffs, j, t)  # noqa: E731
    else:
        s = gen_sine(1.0, 2.0, 0.0, 0.0, dt, n)
        truth = lambda t: sine_derivative(1.0, 2.0, 0.0, j, t)  # noqa: E731
    out = differentiate_series(s, KernelSpec(N, j, T))
    return float(np.max(np.abs(out.values - truth(out.times))))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--signal", choices=("cubic", "sine"), default="cubic")
    p.add_argument("-N", type=int, default=3)
    p.add_argument("-j", type=int, default=2)
    p.add_argument("-T", type=float, default=0.5)
    p.add_argument("--span", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=5, help="number of halvings")
    args = p.parse_args()

    dt = 4e-3
    prev = None
    print(f"{'dt':>10} {'max_err':>12} {'ratio':>8}")
    for _ in range(args.steps):
        err = max_error(args.signal, args.N, args.j, args.T, dt, args.span)
        ratio = f"{prev / err:8.2f}" if prev else " " * 8
        print(f"{dt:10.2e} {err:12.4e} {ratio}")
        prev, dt = err, dt / 2


if __name__ == "__main__":
    main()
