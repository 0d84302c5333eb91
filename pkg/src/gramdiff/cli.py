"""Command-line interface: ``gramdiff <subcommand> ...``.

Exit codes: 0 success, 1 validation, 2 numerical (singular / not excited),
3 input/output.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import io as gio
from .errors import ConfigurationError, DomainError, NumericalError, RangeError
from .expanding import run_info_filter
from .gramian import WeightSpec, gramian_entries, gramian_inverse_closed, weighted_estimator_kernels, weighted_gramian
from .identifier import PE_THRESHOLD, identify
from .kernels import FAMILIES, GRAMIAN, KernelSpec, build_kernel, eval_kernel, kernel_to_json
from .runtime import differentiate_series, reconstruct_all, reconstruct_state, window_samples
from .signals import GAUSSIAN, UNIFORM, NoiseSpec
from .simulate import SimulationConfig, run_simulation
from .verify import format_table, run_verification

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _perturbation(text):
    parts = text.split(",")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError("expected N,j,k[,delta]")
    try:
        N, j, k = (int(p) for p in parts[:3])
        delta = parts[3] if len(parts) == 4 else "1"
        return N, j, k, Fraction(delta)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad perturbation {text!r}") from None


def _echo_effective_T(requested, effective):
    if requested != effective:
        print(f"--effective-T {effective!r} (requested T={requested!r} snapped to the sample grid)",
              file=sys.stderr)


def cmd_kernel(args):
    if args.m:
        k = weighted_estimator_kernels(args.N, args.T, WeightSpec(args.m))[args.j]
    else:
        k = build_kernel(args.family, args.N, args.j, args.T)
    if args.samples is None:
        text = kernel_to_json(k) + "\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    if args.samples < 1:
        raise ConfigurationError("--samples must be at least 1")
    if args.samples == 1:
        sig = np.array([0.0])
    else:
        sig = np.linspace(0.0, args.T, args.samples)
    vals = [eval_kernel(k, s) for s in sig]
    gio.write_table(args.output, ["sigma", "value"], [sig, vals])


def cmd_gramian(args):
    if args.inverse:
        if args.m:
            raise ConfigurationError("--inverse is only available in closed form for m=0")
        g = gramian_inverse_closed(args.N, args.t0, args.t1)
    elif args.m:
        g = weighted_gramian(args.N, args.t0, args.t1, WeightSpec(args.m))
    else:
        g = gramian_entries(args.N, args.t0, args.t1)
    text = g.to_json() + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_diff(args):
    s = gio.read_series(args.input)
    _, T_eff = window_samples(args.T, s.dt, args.N)
    _echo_effective_T(args.T, T_eff)
    out = differentiate_series(s, KernelSpec(args.N, args.j, args.T), args.family)
    gio.write_series(args.output, out, f"yhat_{args.j}")


def cmd_reconstruct(args):
    s = gio.read_series(args.input)
    header = ["t"] + [f"x{i}" for i in range(args.N + 1)]
    if args.all:
        times, X, T_eff = reconstruct_all(s, args.N, args.T, args.family)
        _echo_effective_T(args.T, T_eff)
        gio.write_table(args.output, header, [times] + [X[:, i] for i in range(args.N + 1)])
        return
    st = reconstruct_state(s, args.N, args.T, args.at, args.family)
    _echo_effective_T(args.T, st.effective_T)
    if abs(st.t - args.at) > 1e-9 * s.dt:
        print(f"estimation time {args.at!r} snapped to sample t={st.t!r}", file=sys.stderr)
    gio.write_table(args.output, header, [[st.t]] + [[v] for v in st.x])


def cmd_verify(args):
    checks = run_verification(args.max_N, perturb=args.inject_perturbation)
    print(format_table(checks))
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_NUMERICAL


def cmd_simulate(args):
    cfg = SimulationConfig(
        signal=args.signal,
        coeffs=args.coeffs,
        amplitude=args.amplitude,
        omega=args.omega,
        phase=args.phase,
        t0=args.t0,
        dt=args.dt,
        n=args.n,
        noise=NoiseSpec(args.noise, args.noise_level, args.seed),
        N=args.N,
        j=args.j,
        T=args.T,
        family=args.family,
    )
    metrics = run_simulation(cfg)
    _echo_effective_T(args.T, metrics["effective_T"])
    text = json.dumps(metrics, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_infofilter(args):
    s = gio.read_series(args.input)
    tr = run_info_filter(s, args.N, args.t_warm, substeps=args.substeps)
    header = ["t"] + [f"x{i}" for i in range(args.N + 1)] + ["s_logdet"]
    cols = [tr.times] + [tr.xhat[:, i] for i in range(args.N + 1)] + [tr.s_logdet]
    gio.write_table(args.output, header, cols)


def cmd_identify(args):
    r = gio.read_regressors(args.input)
    res = identify(r, args.T, args.at, threshold=args.pe_threshold)
    _echo_effective_T(args.T, res.effective_T)
    text = json.dumps({
        "t": res.t,
        "T": args.T,
        "effective_T": res.effective_T,
        "phi": res.phi.tolist(),
        "pe_metric": res.pe_metric,
    }, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    p = _Parser(prog="gramdiff", description="Algebraic / Gramian derivative estimation.",
                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def common(sp, j=True, T=True):
        sp.add_argument("-N", type=int, required=True, help="polynomial model degree")
        if j:
            sp.add_argument("-j", type=int, required=True, help="derivative order (0 <= j <= N)")
        if T:
            sp.add_argument("-T", type=float, default=1.0, help="window length in seconds")
        sp.add_argument("-o", "--output", default=None, help="output path; stdout when omitted")

    sp = sub.add_parser("kernel", help="print a kernel (exact JSON or sampled CSV)", formatter_class=fmt)
    common(sp)
    sp.add_argument("--family", choices=FAMILIES, default=GRAMIAN)
    sp.add_argument("-m", type=int, default=0, help="weight exponent for (tau - t0)**m kernels")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--samples", type=int, default=None, help="emit this many (sigma, value) rows")
    g.add_argument("--exact", action="store_true", help="emit the exact rational JSON dump (default)")
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("gramian", help="dump a Gramian or its closed-form inverse as JSON", formatter_class=fmt)
    sp.add_argument("-N", type=int, required=True)
    sp.add_argument("--t0", type=float, default=0.0)
    sp.add_argument("--t1", type=float, default=1.0)
    sp.add_argument("-m", type=int, default=0, help="weight exponent")
    sp.add_argument("--inverse", action="store_true")
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_gramian)

    sp = sub.add_parser("diff", help="moving-horizon j-th derivative of a t,y CSV", formatter_class=fmt)
    sp.add_argument("input")
    common(sp)
    sp.add_argument("--family", choices=FAMILIES, default=GRAMIAN)
    sp.set_defaults(func=cmd_diff)

    sp = sub.add_parser("reconstruct", help="deadbeat state reconstruction from a t,y CSV", formatter_class=fmt)
    sp.add_argument("input")
    common(sp, j=False)
    sp.add_argument("--family", choices=FAMILIES, default=GRAMIAN)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--at", type=float, help="estimation time")
    g.add_argument("--all", action="store_true", help="every full-window sample")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("verify", help="run the exact identity suites", formatter_class=fmt)
    sp.add_argument("--max-N", dest="max_N", type=int, default=8)
    sp.add_argument("--inject-perturbation", type=_perturbation, default=None, metavar="N,j,k[,delta]",
                    help="negative control: perturb one algebraic coefficient before comparing")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="signal + seeded noise + estimator metrics (JSON)", formatter_class=fmt)
    sp.add_argument("--signal", choices=("poly", "sine"), default="poly")
    sp.add_argument("--coeffs", type=_floats, default=(0.0,), help="a_0,...,a_K with y = sum a_i t^i / i!")
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--phase", type=float, default=0.0)
    sp.add_argument("--t0", type=float, default=0.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--n", type=int, default=2001, help="number of samples")
    sp.add_argument("--noise", choices=(UNIFORM, GAUSSIAN), default=UNIFORM)
    sp.add_argument("--noise-level", type=float, default=0.0, help="uniform half-width or gaussian sigma")
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(T=0.1)
    sp.add_argument("--family", choices=FAMILIES, default=GRAMIAN)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("infofilter", help="expanding-horizon information filter on a t,y CSV", formatter_class=fmt)
    sp.add_argument("input")
    sp.add_argument("-N", type=int, required=True)
    sp.add_argument("--t-warm", type=float, required=True, help="warm-start time")
    sp.add_argument("--substeps", type=int, default=1, help="fixed RK4 steps per sample interval")
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_infofilter)

    sp = sub.add_parser("identify", help="receding-horizon parameter identification (JSON)", formatter_class=fmt)
    sp.add_argument("input", help="CSV with header t,w1..wp,y")
    sp.add_argument("-T", type=float, required=True)
    sp.add_argument("--at", type=float, required=True)
    sp.add_argument("--pe-threshold", type=float, default=PE_THRESHOLD)
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_identify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1 via _Parser.error; --help exits 0
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rc = args.func(args)
    except (DomainError, RangeError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())
