"""CSV readers and writers for sampled series."""
from __future__ import annotations

import csv
import io
import sys
from contextlib import contextmanager

import numpy as np

from .errors import ConfigurationError, GramdiffError
from .identifier import RegressorSeries
from .signals import SignalSeries

GRID_RTOL = 1e-9


class InputFormatError(GramdiffError, OSError):
    """Unreadable or malformed input file."""


@contextmanager
def _open(path, mode):
    if path in (None, "-"):
        yield sys.stdout if "w" in mode else sys.stdin
    else:
        with open(path, mode, newline="") as fh:
            yield fh


def _read_table(path):
    with _open(path, "r") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise InputFormatError(f"{path}: non-numeric value ({exc})") from None
    if data.size == 0:
        raise ConfigurationError(f"{path}: no samples")
    if data.ndim != 2 or data.shape[1] != len(header):
        raise InputFormatError(f"{path}: rows do not match the header {header}")
    return header, data


def uniform_grid(t):
    """``(t0, dt)`` of a uniform time column; raises on irregular sampling."""
    t = np.asarray(t, dtype=float)
    if t.size == 1:
        raise ConfigurationError("a single sample does not define a sample step")
    dt = (t[-1] - t[0]) / (t.size - 1)
    if not dt > 0:
        raise ConfigurationError("time column must be strictly increasing")
    dev = np.max(np.abs(t - (t[0] + dt * np.arange(t.size))))
    if dev > GRID_RTOL * dt:
        raise ConfigurationError(f"time column is not uniformly sampled (deviation {dev:.3e})")
    return float(t[0]), float(dt)


def read_series(path) -> SignalSeries:
    header, data = _read_table(path)
    if header != ["t", "y"]:
        raise InputFormatError(f"{path}: expected header 't,y', got {','.join(header)}")
    t0, dt = uniform_grid(data[:, 0])
    return SignalSeries(t0, dt, data[:, 1])


def read_regressors(path) -> RegressorSeries:
    header, data = _read_table(path)
    p = len(header) - 2
    expected = ["t"] + [f"w{i}" for i in range(1, p + 1)] + ["y"]
    if p < 1 or header != expected:
        raise InputFormatError(f"{path}: expected header {','.join(expected)}, got {','.join(header)}")
    t0, dt = uniform_grid(data[:, 0])
    return RegressorSeries(t0, dt, data[:, 1:-1], data[:, -1])


def write_table(path, header, columns):
    cols = [np.asarray(c, dtype=float) for c in columns]
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


def write_series(path, s: SignalSeries, name="y"):
    write_table(path, ["t", name], [s.times, s.values])


def series_to_csv(s: SignalSeries, name="y"):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", name])
    for t, v in zip(s.times, s.values):
        w.writerow([repr(float(t)), repr(float(v))])
    return buf.getvalue()
