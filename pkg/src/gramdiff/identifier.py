"""Receding-horizon parameter identification for ``y(t) = omega(t)^T phi``.

The estimate on ``[t - T, t]`` is ``W^-1 int omega y`` with the regressor
Gramian ``W = int omega omega^T``.  Both integrals use the trapezoid rule on
the sampled products, i.e. exact integration of their piecewise-linear
interpolants.  Because the same rule is applied to both sides, data lying
exactly in the span of the regressors is recovered to rounding error.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, ExcitationError

PE_THRESHOLD = 1e-10


@dataclass(frozen=True)
class RegressorSeries:
    t0: float
    dt: float
    omega: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError(f"sample step must be positive, got {self.dt}")
        om = np.asarray(self.omega, dtype=float)
        if om.ndim == 1:
            om = om[:, None]
        y = np.asarray(self.y, dtype=float)
        if om.ndim != 2 or om.shape[0] != y.size or y.ndim != 1:
            raise ConfigurationError(
                f"regressors {om.shape} and outputs {y.shape} must have matching length"
            )
        if om.shape[1] < 1:
            raise ConfigurationError("need at least one regressor")
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.size

    @property
    def p(self):
        return self.omega.shape[1]

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(len(self))

    @classmethod
    def from_functions(cls, omega_fn, y_fn, t0, dt, n):
        t = t0 + dt * np.arange(n)
        om = np.column_stack([np.broadcast_to(np.asarray(f(t), dtype=float), t.shape) for f in omega_fn])
        return cls(t0, dt, om, np.broadcast_to(np.asarray(y_fn(t), dtype=float), t.shape))


def _window(r: RegressorSeries, t_lo, t_hi):
    lo = int(round((t_lo - r.t0) / r.dt))
    hi = int(round((t_hi - r.t0) / r.dt))
    if lo < 0 or hi >= len(r):
        raise ConfigurationError(
            f"window [{t_lo}, {t_hi}] is outside the series span "
            f"[{r.t0}, {r.t0 + r.dt * (len(r) - 1)}]"
        )
    if hi <= lo:
        raise ConfigurationError(f"empty window [{t_lo}, {t_hi}]")
    w = np.full(hi - lo + 1, r.dt)
    w[0] = w[-1] = 0.5 * r.dt
    return slice(lo, hi + 1), w


def regressor_gramian(r: RegressorSeries, t_lo, t_hi):
    """``int omega omega^T`` over ``[t_lo, t_hi]`` (endpoints snapped to samples)."""
    sl, w = _window(r, t_lo, t_hi)
    om = r.omega[sl]
    g = om.T @ (w[:, None] * om)
    return 0.5 * (g + g.T)


def pe_metric(g):
    """Smallest eigenvalue over the mean eigenvalue; 0 means no excitation."""
    g = np.asarray(g, dtype=float)
    p = g.shape[0]
    tr = np.trace(g)
    if tr <= 0:
        return 0.0
    lam = np.linalg.eigvalsh(0.5 * (g + g.T))[0]
    return float(min(max(lam / (tr / p), 0.0), 1.0))


@dataclass
class Identification:
    phi: np.ndarray
    pe_metric: float
    t: float
    effective_T: float
    gramian: np.ndarray = field(repr=False)


def identify(r: RegressorSeries, T, t, threshold=PE_THRESHOLD) -> Identification:
    """Estimate ``phi`` from the window ``[t - T, t]``.

    Raises ``ExcitationError`` when ``pe_metric`` of the regressor Gramian is
    below ``threshold``; the error carries the least-excited direction.
    """
    n = int(round((t - r.t0) / r.dt))
    M = int(round(T / r.dt))
    if M < 1:
        raise ConfigurationError(f"window T={T} is shorter than one sample step")
    t_hi = r.t0 + n * r.dt
    t_lo = t_hi - M * r.dt
    sl, w = _window(r, t_lo, t_hi)
    om = r.omega[sl]
    g = om.T @ (w[:, None] * om)
    g = 0.5 * (g + g.T)
    b = om.T @ (w * r.y[sl])
    pe = pe_metric(g)
    if pe < threshold:
        vals, vecs = np.linalg.eigh(g)
        direction = vecs[:, 0]
        raise ExcitationError(
            f"regressors are not persistently exciting on [{t_lo}, {t_hi}]: "
            f"pe_metric={pe:.3e} < {threshold:.1e}; deficient direction {np.round(direction, 6).tolist()}",
            direction=direction,
            metric=pe,
        )
    phi = scipy.linalg.cho_solve(scipy.linalg.cho_factor(g), b)
    return Identification(phi, pe, t_hi, M * r.dt, g)
