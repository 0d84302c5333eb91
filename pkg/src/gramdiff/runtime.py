"""FIR realization of the kernels and moving-horizon estimation on sampled data.

Taps are the exact integrals of the kernel against the piecewise-linear
("hat") interpolation basis on the sample grid, so the discrete sum equals
the continuous window integral of the linearly interpolated signal.  Signals
that are linear between samples are therefore differentiated exactly, and
smooth signals incur an O(dt**2) interpolation error.
"""
from __future__ import annotations

import logging
import math
import os
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError
from .kernels import GRAMIAN, KernelPoly, KernelSpec, build_kernel, validate_spec
from .signals import SignalSeries

log = logging.getLogger(__name__)

PIECEWISE_LINEAR_EXACT = "PiecewiseLinearExact"
DEFAULT_MAX_N = 12
WARN_N = 8


class PrecisionWarning(UserWarning):
    pass


def max_float_n():
    """Degree cap for floating pipelines; ``GRAMDIFF_MAX_N`` overrides it."""
    raw = os.environ.get("GRAMDIFF_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"GRAMDIFF_MAX_N must be an integer, got {raw!r}") from None


def check_float_degree(N):
    cap = max_float_n()
    if N > cap:
        raise ConfigurationError(
            f"N={N} exceeds the floating-point degree cap {cap} (set GRAMDIFF_MAX_N to override)"
        )
    if N > WARN_N:
        warnings.warn(
            f"N={N}: kernel coefficients grow like 16**N and floating evaluation loses digits",
            PrecisionWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class FirTaps:
    """Discrete kernel weights; ``weights[i]`` multiplies ``y(t - i*dt)``."""

    spec: KernelSpec
    dt: float
    weights: np.ndarray
    requested_T: float
    exactness_class: str = PIECEWISE_LINEAR_EXACT

    @property
    def M(self):
        return self.weights.size - 1

    @property
    def effective_T(self):
        return self.spec.T

    @property
    def snapped(self):
        return self.requested_T != self.spec.T


def window_samples(T, dt, N):
    """Number of sample intervals ``M`` covering the window, and the snapped T."""
    if not dt > 0:
        raise ConfigurationError(f"sample step must be positive, got {dt}")
    M = int(round(T / dt))
    if M < N + 1:
        raise ConfigurationError(
            f"window T={T} spans {M} sample intervals; at least N+1={N + 1} are needed"
        )
    T_eff = T if abs(M * dt - T) <= 1e-9 * T else M * dt
    if T_eff != T:
        log.info("window snapped to the sample grid: T=%r -> effective T=%r", T, T_eff)
    return M, T_eff


def _antiderivative(p):
    return [Fraction(0)] + [c / (k + 1) for k, c in enumerate(p)]


@lru_cache(maxsize=256)
def _normalized_taps(coeffs, M):
    """Exact ``int_0^1 p(u) hat_i(u) du`` on the grid ``u_i = i/M``."""
    p = list(coeffs)
    P0 = _antiderivative(p)
    P1 = _antiderivative([Fraction(0)] + p)

    def ev(poly, x):
        acc = Fraction(0)
        for c in reversed(poly):
            acc = acc * x + c
        return acc

    nodes = [Fraction(i, M) for i in range(M + 1)]
    v0 = [ev(P0, u) for u in nodes]
    v1 = [ev(P1, u) for u in nodes]
    w = [Fraction(0)] * (M + 1)
    for s in range(M):
        a, b = nodes[s], nodes[s + 1]
        d0 = v0[s + 1] - v0[s]
        d1 = v1[s + 1] - v1[s]
        # hat_s falls from 1 to 0 on [a, b]; hat_{s+1} rises
        w[s] += (b * d0 - d1) * M
        w[s + 1] += (d1 - a * d0) * M
    return tuple(float(x) for x in w)


def discretize_kernel(k: KernelPoly, dt) -> FirTaps:
    """Hat-basis quadrature weights for kernel ``k`` at sample step ``dt``.

    If T is not a multiple of dt (to 1e-9 relative) it is snapped to
    ``round(T/dt) * dt``; the effective window is carried by ``taps.spec.T``.
    """
    N, j = k.spec.N, k.spec.j
    check_float_degree(N)
    M, T_eff = window_samples(k.spec.T, dt, N)
    w = np.array(_normalized_taps(tuple(k.coeffs), M)) * T_eff ** (-j)
    return FirTaps(KernelSpec(N, j, T_eff), dt, w, k.spec.T)


def build_taps(N, j, T, dt, family=GRAMIAN):
    return discretize_kernel(build_kernel(family, N, j, T), dt)


def discrete_moments(taps: FirTaps, orders):
    """``sum_i w_i (-i dt)**k / k!`` for each ``k`` in ``orders``."""
    sig = -taps.dt * np.arange(taps.weights.size)
    return [float(np.dot(taps.weights, sig**k)) / math.factorial(k) for k in orders]


class StreamingDifferentiator:
    """Causal sliding-window estimator over a ring buffer of M+1 samples."""

    def __init__(self, taps: FirTaps):
        self.taps = taps
        # newest sample first, matching weights[i] <-> delay i*dt
        self._rev = taps.weights
        self._buf = deque(maxlen=taps.M + 1)

    def push(self, y):
        """Add a sample; returns the estimate once the window is full, else None."""
        self._buf.appendleft(float(y))
        if len(self._buf) <= self.taps.M:
            return None
        return float(np.dot(self._rev, np.fromiter(self._buf, float, len(self._buf))))

    @property
    def ready(self):
        return len(self._buf) == self.taps.M + 1

    def reset(self):
        self._buf.clear()


def push_sample(state: StreamingDifferentiator, y):
    return state.push(y)


def apply_taps(taps: FirTaps, values):
    """All full-window estimates; output ``n`` belongs to input sample ``n + M``."""
    values = np.asarray(values, dtype=float)
    if values.size < taps.M + 1:
        raise ConfigurationError(
            f"series of {values.size} samples is shorter than the window ({taps.M + 1} samples)"
        )
    windows = np.lib.stride_tricks.sliding_window_view(values, taps.M + 1)
    # windows[n] holds y[n..n+M] oldest first; weights are newest first
    return windows @ taps.weights[::-1]


def differentiate_series(s: SignalSeries, spec: KernelSpec, family=GRAMIAN) -> SignalSeries:
    """Moving-horizon estimate of the ``spec.j``-th derivative over the whole series.

    The output starts at ``s.t0 + T`` where T is the effective (grid) window.
    """
    taps = build_taps(spec.N, spec.j, spec.T, s.dt, family)
    out = apply_taps(taps, s.values)
    return SignalSeries(s.t0 + taps.M * s.dt, s.dt, out)


@dataclass(frozen=True)
class StateVec:
    """Derivative estimates ``(y, y', ..., y^(N))`` at time ``t``."""

    t: float
    x: np.ndarray
    effective_T: float | None = None
    requested_t: float | None = None


def state_taps(N, T, dt, family=GRAMIAN):
    validate_spec(N, 0, T)
    return [build_taps(N, j, T, dt, family) for j in range(N + 1)]


def reconstruct_state(s: SignalSeries, N, T, t, family=GRAMIAN) -> StateVec:
    """Deadbeat reconstruction of all N+1 derivatives at time ``t``.

    ``t`` is snapped to the nearest sample; ``requested_t`` keeps the input.
    """
    taps = state_taps(N, T, s.dt, family)
    M = taps[0].M
    n, off_grid = s.index_of(t)
    if off_grid:
        log.info("estimation time %r snapped to sample %r", t, s.t0 + n * s.dt)
    if n < M or n >= len(s):
        raise ConfigurationError(
            f"t={t} needs samples in [t - T, t] within the series "
            f"[{s.t0}, {s.t_end}] (T={taps[0].effective_T})"
        )
    # same reduction as apply_taps so both paths agree to rounding
    window = s.values[n - M:n + 1]
    x = np.array([float(apply_taps(tp, window)[0]) for tp in taps])
    return StateVec(s.t0 + n * s.dt, x, taps[0].effective_T, t)


def reconstruct_all(s: SignalSeries, N, T, family=GRAMIAN):
    """State estimates at every full-window sample: ``(times, X)`` with X of shape (n, N+1)."""
    taps = state_taps(N, T, s.dt, family)
    cols = [apply_taps(tp, s.values) for tp in taps]
    M = taps[0].M
    times = s.t0 + s.dt * np.arange(M, len(s))
    return times, np.column_stack(cols), taps[0].effective_T
