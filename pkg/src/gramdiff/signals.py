"""Uniformly sampled signals, test-signal generators, seeded noise, error metrics.

Noise streams come from numpy's PCG64 bit generator (``numpy.random.Generator``
seeded with the 64-bit ``NoiseSpec.seed``), so a given seed reproduces the
same samples on every platform numpy supports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

UNIFORM = "uniform"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SignalSeries:
    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError(f"sample step must be positive, got {self.dt}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise ConfigurationError("a series needs at least one sample")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def t_end(self):
        return self.t0 + self.dt * (self.values.size - 1)

    def index_of(self, t):
        """Nearest sample index to ``t`` and whether ``t`` was off-grid."""
        pos = (t - self.t0) / self.dt
        n = int(round(pos))
        return n, abs(pos - n) > 1e-9


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = UNIFORM
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (UNIFORM, GAUSSIAN):
            raise DomainError(f"unknown noise kind {self.kind!r}")
        if not self.level >= 0:
            raise DomainError(f"noise magnitude must be non-negative, got {self.level}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")

    @property
    def std(self):
        """Standard deviation of one noise sample."""
        if self.kind == UNIFORM:
            return self.level / math.sqrt(3.0)
        return self.level


def gen_polynomial(coeffs, t0, dt, n):
    """Sample ``y(t) = sum_i a_i t**i / i!`` so that ``a_i = y^(i)(0)``."""
    if n < 1:
        raise ConfigurationError("need at least one sample")
    t = t0 + dt * np.arange(n)
    y = np.zeros(n)
    for i, a in enumerate(coeffs):
        y += a * t**i / math.factorial(i)
    return SignalSeries(t0, dt, y)


def poly_derivative(coeffs, order, t):
    """Analytic ``order``-th derivative of the factorial-normalized polynomial."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for i, a in enumerate(coeffs[order:]):
        out = out + a * t**i / math.factorial(i)
    return out


def gen_sine(amplitude, omega, phase, t0, dt, n):
    if n < 1:
        raise ConfigurationError("need at least one sample")
    t = t0 + dt * np.arange(n)
    return SignalSeries(t0, dt, amplitude * np.sin(omega * t + phase))


def sine_derivative(amplitude, omega, phase, order, t):
    return amplitude * omega**order * np.sin(omega * np.asarray(t) + phase + order * math.pi / 2)


def noise_samples(spec: NoiseSpec, n):
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.kind == UNIFORM:
        return rng.uniform(-spec.level, spec.level, size=n)
    return rng.normal(0.0, spec.level, size=n)


def add_noise(s: SignalSeries, spec: NoiseSpec):
    if spec.level == 0:
        return s
    return SignalSeries(s.t0, s.dt, s.values + noise_samples(spec, len(s)))


def align(estimate: SignalSeries, truth: SignalSeries):
    """Overlapping sample ranges of two series on a common grid."""
    if not math.isclose(estimate.dt, truth.dt, rel_tol=1e-9):
        raise ConfigurationError(f"sample steps differ: {estimate.dt} vs {truth.dt}")
    offset = (estimate.t0 - truth.t0) / truth.dt
    k = int(round(offset))
    if abs(offset - k) > 1e-6:
        raise ConfigurationError("series grids are offset by a non-integer number of samples")
    e_start = max(0, -k)
    t_start = max(0, k)
    n = min(len(estimate) - e_start, len(truth) - t_start)
    if n <= 0:
        raise ConfigurationError("series do not overlap")
    return estimate.values[e_start:e_start + n], truth.values[t_start:t_start + n]


def error_metrics(estimate: SignalSeries, truth: SignalSeries):
    e, t = align(estimate, truth)
    err = e - t
    return {
        "rmse": float(np.sqrt(np.mean(err**2))),
        "max_abs": float(np.max(np.abs(err))),
        "mean": float(np.mean(err)),
    }
