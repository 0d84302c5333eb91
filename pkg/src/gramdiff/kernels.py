"""Exact polynomial convolution kernels for derivative estimation.

Two kernel families are built here, both for the model class of degree-N
polynomials observed on a moving window of length T:

* ``algebraic``: the double-sum kernel obtained by operational calculus,
* ``gramian``: the single-sum kernel obtained from the inverse of the
  reconstructibility Gramian of the integrator chain.

Both are stored scale-separated as

    kernel(sigma) = T**-(j+1) * sum_k c_k * (sigma/T)**k

with exact ``Fraction`` coefficients ``c_k`` that do not depend on T.
The estimate of the j-th derivative is ``int_0^T kernel(sigma) y(t - sigma) dsigma``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, RangeError

ALGEBRAIC = "algebraic"
GRAMIAN = "gramian"
FAMILIES = (ALGEBRAIC, GRAMIAN)

CONVENTION = "kernel(sigma)=T^-(j+1) * sum_k c_k (sigma/T)^k"


@dataclass(frozen=True)
class KernelSpec:
    """Model degree ``N``, derivative order ``j`` and window length ``T``."""

    N: int
    j: int
    T: float = 1.0

    def __post_init__(self):
        validate_spec(self.N, self.j, self.T)


def validate_spec(N, j, T=1.0):
    if not isinstance(N, int) or isinstance(N, bool) or N < 0:
        raise DomainError(f"model degree N must be a non-negative integer, got {N!r}")
    if not isinstance(j, int) or isinstance(j, bool) or not 0 <= j <= N:
        raise DomainError(f"derivative order j must satisfy 0 <= j <= N={N}, got {j!r}")
    if not T > 0 or not math.isfinite(T):
        raise DomainError(f"window length T must be positive and finite, got {T!r}")


@dataclass(frozen=True)
class KernelPoly:
    """A polynomial kernel in T-normalized form.

    ``coeffs[k]`` multiplies ``(sigma/T)**k``; the whole sum is scaled by
    ``T**-(j+1)``.  ``m`` is the exponent of the monomial weight used to
    build weighted estimator kernels (0 for the plain families), so the
    polynomial degree is ``N + m``.
    """

    spec: KernelSpec
    coeffs: tuple
    family: str
    m: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if len(self.coeffs) != self.spec.N + self.m + 1:
            raise ValueError(
                f"expected {self.spec.N + self.m + 1} coefficients, got {len(self.coeffs)}"
            )

    @property
    def degree(self):
        return self.spec.N + self.m

    def with_window(self, T):
        """Same normalized coefficients on a different window length."""
        return KernelPoly(KernelSpec(self.spec.N, self.spec.j, T), self.coeffs, self.family, self.m)


def _spec(spec_or_N, j=None, T=1.0):
    if isinstance(spec_or_N, KernelSpec):
        return spec_or_N
    return KernelSpec(spec_or_N, j, T)


def algebraic_monomials(N, j):
    """Expand the algebraic kernel numerator as a homogeneous polynomial.

    Returns ``(numer, denom_power)`` with ``numer[k]`` the exact coefficient of
    ``T**(N-k) * tau**k`` and the kernel equal to ``sum(numer) / T**denom_power``.
    """
    validate_spec(N, j)
    fact = math.factorial
    numer = [Fraction(0)] * (N + 1)
    lead = fact(N + j + 1) * fact(N + 1)
    for k1 in range(N - j + 1):
        for k2 in range(j + 1):
            a = k1 + k2          # power of (T - tau)
            e = N - a            # power of (-tau)
            denom = (
                fact(k1) * fact(k2) * fact(N - j - k1) * fact(j - k2)
                * fact(e) * fact(a) * (N - k1 + 1)
            )
            weight = Fraction(lead, denom)
            # (T - tau)**a * (-tau)**e = sum_b C(a,b) T**(a-b) (-1)**(b+e) tau**(b+e)
            for b in range(a + 1):
                sign = -1 if (b + e) % 2 else 1
                numer[b + e] += sign * math.comb(a, b) * weight
    return numer, N + j + 1


def build_algebraic_kernel(spec_or_N, j=None, T=1.0):
    """Algebraic (operational-calculus) kernel for the j-th derivative.

    The double sum over ``(kappa1, kappa2)`` is expanded binomially and
    collected by powers of tau in exact arithmetic.  Because the numerator
    is homogeneous of degree N, dividing by ``T**(N+j+1)`` leaves
    ``T**-(j+1)`` times a polynomial in ``tau/T``.
    """
    spec = _spec(spec_or_N, j, T)
    numer, _ = algebraic_monomials(spec.N, spec.j)
    return KernelPoly(spec, tuple(numer), ALGEBRAIC)


def build_gramian_kernel(spec_or_N, j=None, T=1.0):
    """Gramian (deadbeat reconstruction) kernel for the j-th derivative."""
    spec = _spec(spec_or_N, j, T)
    N, j = spec.N, spec.j
    fact = math.factorial
    pre = Fraction(fact(N + j + 1), fact(j) * fact(N - j))
    coeffs = []
    for k in range(N + 1):
        term = Fraction(fact(N + k + 1), (j + k + 1) * fact(N - k) * fact(k) ** 2)
        coeffs.append(pre * term if k % 2 == 0 else -pre * term)
    return KernelPoly(spec, tuple(coeffs), GRAMIAN)


def build_kernel(family, N, j, T=1.0):
    if family == ALGEBRAIC:
        return build_algebraic_kernel(N, j, T)
    if family == GRAMIAN:
        return build_gramian_kernel(N, j, T)
    raise DomainError(f"unknown kernel family {family!r}")


def horner(coeffs: Sequence, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def eval_kernel(k: KernelPoly, sigma):
    """Evaluate the kernel at ``sigma`` in ``[0, T]`` (floating point)."""
    T = float(k.spec.T)
    sigma = float(sigma)
    # tolerate representation error at the right end of the window
    if sigma < 0 or sigma > T * (1 + 1e-12):
        raise RangeError(f"sigma={sigma} outside the kernel window [0, {T}]")
    u = min(sigma / T, 1.0)
    return horner([float(c) for c in k.coeffs], u) * T ** -(k.spec.j + 1)


def eval_kernel_exact(k: KernelPoly, sigma, T=None):
    """Exact evaluation for rational ``sigma`` and ``T``."""
    T = Fraction(k.spec.T if T is None else T)
    sigma = Fraction(sigma)
    if sigma < 0 or sigma > T:
        raise RangeError(f"sigma={sigma} outside the kernel window [0, {T}]")
    return horner(k.coeffs, sigma / T) / T ** (k.spec.j + 1)


@dataclass
class EquivalenceResult:
    j: int
    equal: bool
    index: int | None = None
    algebraic: Fraction | None = None
    gramian: Fraction | None = None


@dataclass
class EquivalenceReport:
    N: int
    results: list = field(default_factory=list)

    @property
    def all_equal(self):
        return all(r.equal for r in self.results)

    def first_mismatch(self):
        return next((r for r in self.results if not r.equal), None)


def compare_coeffs(a, b):
    """Index of the first differing coefficient, or None."""
    if len(a) != len(b):
        return min(len(a), len(b))
    return next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), None)


def kernels_equal(N, perturb=None):
    """Compare both kernel families coefficient by coefficient for each j.

    ``perturb`` is a test hook: a ``(j, k, delta)`` triple added to the
    algebraic coefficient ``k`` of order ``j`` before comparison.
    """
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    report = EquivalenceReport(N)
    for j in range(N + 1):
        h = list(build_algebraic_kernel(N, j).coeffs)
        g = build_gramian_kernel(N, j).coeffs
        if perturb is not None and perturb[0] == j:
            h[perturb[1]] += Fraction(perturb[2])
        idx = compare_coeffs(h, g)
        if idx is None:
            report.results.append(EquivalenceResult(j, True))
        else:
            report.results.append(EquivalenceResult(j, False, idx, h[idx], g[idx]))
    return report


def kernel_moment(k: KernelPoly, order):
    """T-free part of ``int_0^T kernel(sigma) (-sigma)**order / order! dsigma``.

    The full integral equals this value times ``T**(order - j)``; for an exact
    estimator it is 1 when ``order == j`` and 0 otherwise, so the T factor
    never matters.
    """
    s = sum(c / (i + order + 1) for i, c in enumerate(k.coeffs))
    s /= math.factorial(order)
    return -s if order % 2 else s


def moment_matrix(family, N, m=0):
    """Entry ``(j, k)`` is the k-th moment of the order-j kernel.

    With ``m > 0`` the weighted estimator kernels are used (``family`` must
    then be ``gramian``).  The contract is that the result is the identity.
    """
    if m:
        from .gramian import WeightSpec, weighted_estimator_kernels

        if family != GRAMIAN:
            raise DomainError("weighted kernels exist only for the gramian family")
        kernels = weighted_estimator_kernels(N, 1, WeightSpec(m))
    else:
        kernels = [build_kernel(family, N, j) for j in range(N + 1)]
    return [[kernel_moment(kern, order) for order in range(N + 1)] for kern in kernels]


def is_identity(mat):
    return all(v == (1 if i == j else 0) for i, row in enumerate(mat) for j, v in enumerate(row))


def reflection_check(spec_or_N, j=None):
    """Check ``(-1) H_j(-T, -tau) == (-1)**j H_j(T, tau)`` on exact coefficients.

    The substitution acts on the homogeneous numerator ``T**(N-k) tau**k``
    monomial by monomial and on the ``T**(N+j+1)`` denominator.
    """
    spec = _spec(spec_or_N, j)
    numer, dpow = algebraic_monomials(spec.N, spec.j)
    N = spec.N
    denom_sign = -1 if dpow % 2 else 1
    lhs = [-(c * (-1) ** (N - k) * (-1) ** k) * denom_sign for k, c in enumerate(numer)]
    rhs = [c * (-1) ** spec.j for c in numer]
    return lhs == rhs


def kernel_to_dict(k: KernelPoly):
    d = {
        "family": k.family,
        "N": k.spec.N,
        "j": k.spec.j,
        "coeffs_num": [str(c.numerator) for c in k.coeffs],
        "coeffs_den": [str(c.denominator) for c in k.coeffs],
        "convention": CONVENTION,
    }
    if k.m:
        d["m"] = k.m
    return d


def kernel_to_json(k: KernelPoly, indent=2):
    return json.dumps(kernel_to_dict(k), indent=indent)


def kernel_from_dict(d, T=1.0):
    coeffs = tuple(Fraction(int(n), int(q)) for n, q in zip(d["coeffs_num"], d["coeffs_den"]))
    return KernelPoly(KernelSpec(int(d["N"]), int(d["j"]), T), coeffs, d["family"], int(d.get("m", 0)))
