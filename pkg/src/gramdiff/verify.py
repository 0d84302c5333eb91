"""Exact self-checks over all degrees up to a bound."""
from __future__ import annotations

from dataclasses import dataclass

from .gramian import (
    gramian_times_inverse,
    hilbert,
    hilbert_inverse,
    hilbert_scaling_symbolic,
    identity,
    matmul,
)
from .kernels import FAMILIES, is_identity, kernels_equal, moment_matrix, reflection_check


@dataclass
class Check:
    name: str
    N: int
    passed: bool
    detail: str = ""


def run_verification(max_n, perturb=None):
    """Run every exact identity for ``N = 0..max_n``.

    ``perturb = (N, j, k, delta)`` injects ``delta`` into algebraic coefficient
    ``k`` of order ``j`` at degree ``N`` before the equivalence comparison,
    as a negative control.
    """
    checks = []
    for N in range(max_n + 1):
        p = perturb[1:] if perturb is not None and perturb[0] == N else None
        rep = kernels_equal(N, perturb=p)
        bad = rep.first_mismatch()
        detail = "" if bad is None else (
            f"j={bad.j} coefficient {bad.index}: algebraic={bad.algebraic} gramian={bad.gramian}"
        )
        checks.append(Check("kernel equivalence", N, rep.all_equal, detail))
        for fam in FAMILIES:
            checks.append(Check(f"moment identity ({fam})", N, is_identity(moment_matrix(fam, N))))
        checks.append(Check("gramian x inverse", N, gramian_times_inverse(N) == identity(N + 1)))
        checks.append(Check("hilbert scaling", N, hilbert_scaling_symbolic(N) == hilbert(N + 1)))
        checks.append(Check("hilbert inverse", N,
                            matmul(hilbert(N + 1), hilbert_inverse(N + 1)) == identity(N + 1)))
        checks.append(Check("reflection identity", N,
                            all(reflection_check(N, j) for j in range(N + 1))))
    return checks


def format_table(checks):
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'N':>3}  result"]
    for c in checks:
        line = f"{c.name:<{width}}  {c.N:>3}  {'PASS' if c.passed else 'FAIL'}"
        if c.detail:
            line += f"  {c.detail}"
        lines.append(line)
    return "\n".join(lines)
