"""Transition matrices and reconstructibility Gramians of the integrator chain.

Indices: the formulas below are quoted with 1-based ``(i, j)``; storage is
0-based, so stored ``[a][b]`` is formula entry ``(a + 1, b + 1)``.  See
``INDEX_BASE``.

Every Gramian is kept scale-separated: entry ``[a][b]`` equals
``L**exponents[a][b] * normalized[a][b]`` where ``L = t1 - t0``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, NumericalError
from .kernels import GRAMIAN, KernelPoly, KernelSpec, validate_spec

# formula index = storage index + INDEX_BASE
INDEX_BASE = 1

# float inversion of Hilbert-type matrices loses most digits from here on
CONDITIONING_WARN_N = 9


class ConditioningWarning(UserWarning):
    pass


def _as_exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    # decimal repr keeps 0.1 as 1/10 instead of its binary expansion
    return Fraction(repr(float(x)))


def _check_interval(t0, t1):
    if not t1 > t0:
        raise DomainError(f"need t1 > t0, got t0={t0}, t1={t1}")


@dataclass(frozen=True)
class TransitionMatrix:
    N: int
    dt: object
    entries: np.ndarray


def transition(N, dt):
    """``exp(A dt)`` for the (N+1)-state integrator chain.

    Works for float or ``Fraction`` offsets; the series is finite because A
    is nilpotent.
    """
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    exact = isinstance(dt, (int, Fraction))
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    rows = []
    for i in range(N + 1):
        row = []
        for k in range(N + 1):
            if k < i:
                row.append(zero)
            elif k == i:
                row.append(one)
            else:
                row.append((Fraction(dt) if exact else dt) ** (k - i) / math.factorial(k - i))
        rows.append(row)
    return TransitionMatrix(N, dt, np.array(rows, dtype=object if exact else float))


@dataclass(frozen=True)
class GramianMatrix:
    """Scale-separated exact matrix with a floating mirror."""

    N: int
    t0: float
    t1: float
    normalized: tuple
    exponents: tuple
    m: int = 0
    kind: str = "gramian"

    @property
    def length(self):
        return self.t1 - self.t0

    @property
    def size(self):
        return len(self.normalized)

    def exact(self, L=None):
        """Exact entries for a rational window length (default ``t1 - t0``)."""
        L = _as_exact(self.t1) - _as_exact(self.t0) if L is None else Fraction(L)
        return [[r * L ** p for r, p in zip(rrow, prow)]
                for rrow, prow in zip(self.normalized, self.exponents)]

    @property
    def entries(self):
        L = float(self.length)
        return np.array([[float(r) * L ** p for r, p in zip(rrow, prow)]
                         for rrow, prow in zip(self.normalized, self.exponents)])

    def to_dict(self):
        exact = self.exact()
        return {
            "kind": self.kind,
            "N": self.N,
            "t0": float(self.t0),
            "t1": float(self.t1),
            "m": self.m,
            "entries": [[f"{v.numerator}/{v.denominator}" for v in row] for row in exact],
            "normalized": [[f"{v.numerator}/{v.denominator}" for v in row] for row in self.normalized],
            "length_exponents": [list(row) for row in self.exponents],
            "float": self.entries.tolist(),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def gramian_entries(N, t0, t1):
    """Reconstructibility Gramian ``W_r(t0, t1)`` of the integrator chain.

    ``(i, j) -> -(t0 - t1)**(i+j-1) / ((i-1)! (j-1)! (i+j-1))``.
    """
    _check_interval(t0, t1)
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    fact = math.factorial
    norm, expo = [], []
    for a in range(N + 1):
        nrow, erow = [], []
        for b in range(N + 1):
            p = a + b + 1
            # -(t0 - t1)**p = -(-1)**p L**p
            sign = 1 if p % 2 == 0 else -1
            nrow.append(Fraction(-sign, fact(a) * fact(b) * p))
            erow.append(p)
        norm.append(tuple(nrow))
        expo.append(tuple(erow))
    return GramianMatrix(N, t0, t1, tuple(norm), tuple(expo))


def _inverse_core(N, i, j):
    # 1-based (i, j); the combinatorial factor shared with the Hilbert inverse
    return (
        (i + j - 1)
        * math.comb(N + i, N + 1 - j)
        * math.comb(N + j, N + 1 - i)
        * math.comb(i + j - 2, i - 1) ** 2
    )


def gramian_inverse_closed(N, t0, t1):
    """Closed-form inverse of ``W_r(t0, t1)``.

    ``(i, j) -> (i-1)! (j-1)! (i+j-1) / L**(i+j-1) * C(N+i, N+1-j) C(N+j, N+1-i) C(i+j-2, i-1)**2``
    """
    _check_interval(t0, t1)
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    fact = math.factorial
    norm, expo = [], []
    for i in range(1, N + 2):
        norm.append(tuple(Fraction(fact(i - 1) * fact(j - 1) * _inverse_core(N, i, j))
                          for j in range(1, N + 2)))
        expo.append(tuple(-(i + j - 1) for j in range(1, N + 2)))
    return GramianMatrix(N, t0, t1, tuple(norm), tuple(expo), kind="inverse")


def hilbert(n):
    return [[Fraction(1, i + j - 1) for j in range(1, n + 1)] for i in range(1, n + 1)]


def hilbert_inverse(n):
    """Exact inverse of the n-by-n Hilbert matrix (closed form)."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    N = n - 1
    return [[Fraction((-1) ** (i + j) * _inverse_core(N, i, j)) for j in range(1, n + 1)]
            for i in range(1, n + 1)]


def scaled_to_hilbert(N, L):
    """``L * M W_r M`` with ``M = diag((i-1)! / (t0 - t1)**i)``, exactly.

    For a correct Gramian this is the (N+1)-by-(N+1) Hilbert matrix.
    """
    L = Fraction(L)
    W = gramian_entries(N, 0, 1).exact(L)
    # t0 - t1 = -L
    diag = [Fraction(math.factorial(i - 1)) / (-L) ** i for i in range(1, N + 2)]
    return [[L * diag[a] * W[a][b] * diag[b] for b in range(N + 1)] for a in range(N + 1)]


@dataclass(frozen=True)
class WeightSpec:
    """Monomial weight ``lambda(tau, t0) = (tau - t0)**m``."""

    m: int = 0

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 0:
            raise DomainError(f"weight exponent m must be a non-negative integer, got {self.m!r}")


def weighted_gramian(N, t0, t1, w: WeightSpec = WeightSpec()):
    """``W_lambda(t0, t1)`` for the monomial weight ``(tau - t0)**m``.

    Expanding ``(tau - t0)**m = sum_b C(m, b) L**(m-b) (tau - t1)**b`` reduces
    every entry to integrals of powers of ``tau - t1``.
    """
    _check_interval(t0, t1)
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    m = w.m
    fact = math.factorial
    norm, expo = [], []
    for a in range(N + 1):
        nrow, erow = [], []
        for b in range(N + 1):
            q = a + b
            s = Fraction(0)
            for r in range(m + 1):
                # int_{t0}^{t1} (tau - t1)**(r+q) dtau = -(-L)**(r+q+1) / (r+q+1)
                sign = 1 if (r + q) % 2 == 0 else -1
                s += sign * Fraction(math.comb(m, r), r + q + 1)
            nrow.append(s / (fact(a) * fact(b)))
            erow.append(m + q + 1)
        norm.append(tuple(nrow))
        expo.append(tuple(erow))
    return GramianMatrix(N, t0, t1, tuple(norm), tuple(expo), m=m,
                         kind="weighted" if m else "gramian")


def exact_inverse(mat):
    """Gauss-Jordan inverse over the rationals."""
    n = len(mat)
    a = [[Fraction(v) for v in row] + [Fraction(int(i == k)) for k in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise NumericalError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def weighted_estimator_kernels(N, T=1.0, w: WeightSpec = WeightSpec()):
    """Kernels of ``W_lambda^-1 int lambda Phi^T C^T y`` in ``sigma = t - tau``.

    On the window ``[t - T, t]``: ``lambda = (T - sigma)**m`` and row ``i`` of
    ``Phi^T C^T`` is ``(-sigma)**i / i!``.  The result for order ``j`` is a
    degree ``N + m`` polynomial stored in the same normalized convention as
    the plain kernels.
    """
    validate_spec(N, 0, T)
    m = w.m
    Winv = exact_inverse(weighted_gramian(N, 0, 1, w).exact(1))
    _warn_if_ill_conditioned(N, Winv)
    # (1 - u)**m
    lam = [Fraction((-1) ** r * math.comb(m, r)) for r in range(m + 1)]
    kernels = []
    for j in range(N + 1):
        acc = [Fraction(0)] * (N + 1)
        for i in range(N + 1):
            acc[i] += Winv[j][i] * Fraction((-1) ** i, math.factorial(i))
        coeffs = _poly_mul(lam, acc)
        kernels.append(KernelPoly(KernelSpec(N, j, T), tuple(coeffs), GRAMIAN, m))
    return kernels


def _warn_if_ill_conditioned(N, exact_inv):
    if N < CONDITIONING_WARN_N:
        return
    fl = np.array([[float(v) for v in row] for row in exact_inv])
    warnings.warn(
        f"float mirror of the N={N} Gramian inverse has condition number "
        f"{np.linalg.cond(fl):.2e}; use the exact entries",
        ConditioningWarning,
        stacklevel=3,
    )


def gramian_inverse_numeric(g: GramianMatrix):
    """Floating inversion for diagnostics only; the closed form is authoritative."""
    if g.N >= CONDITIONING_WARN_N:
        warnings.warn(
            f"numerical inversion of an N={g.N} Gramian is Hilbert-conditioned "
            f"(cond ~ {np.linalg.cond(g.entries):.2e})",
            ConditioningWarning,
            stacklevel=2,
        )
    return np.linalg.inv(g.entries)


def is_positive_definite(mat):
    try:
        np.linalg.cholesky(np.asarray(mat, dtype=float))
    except np.linalg.LinAlgError:
        return False
    return True


def gramian_times_inverse(N):
    """``W_r W_r^-1`` with the window length kept symbolic.

    Entry ``[a][c]`` is the coefficient of ``L**(a - c)``; the product is the
    identity for every L exactly when this matrix is the identity.
    """
    W = gramian_entries(N, 0, 1)
    V = gramian_inverse_closed(N, 0, 1)
    n = N + 1
    out = []
    for a in range(n):
        row = []
        for c in range(n):
            acc = Fraction(0)
            for b in range(n):
                # L powers: (a+b+1) - (b+c+1) = a - c for every b
                assert W.exponents[a][b] + V.exponents[b][c] == a - c
                acc += W.normalized[a][b] * V.normalized[b][c]
            row.append(acc)
        out.append(row)
    return out


def hilbert_scaling_symbolic(N):
    """``(t1 - t0) M W_r M`` with L symbolic; L cancels from every entry."""
    W = gramian_entries(N, 0, 1)
    fact = math.factorial
    n = N + 1
    # 1-based i, j: L * (i-1)!/(-L)**i * r_ij L**(i+j-1) * (j-1)!/(-L)**j
    return [[(-1) ** (a + b) * fact(a) * fact(b) * W.normalized[a][b] for b in range(n)]
            for a in range(n)]
