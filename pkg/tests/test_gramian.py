import json
import warnings
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
import sympy as sp

from gramdiff.errors import DomainError
from gramdiff.gramian import (
    INDEX_BASE,
    ConditioningWarning,
    WeightSpec,
    exact_inverse,
    gramian_entries,
    gramian_inverse_closed,
    gramian_inverse_numeric,
    gramian_times_inverse,
    hilbert,
    hilbert_inverse,
    hilbert_scaling_symbolic,
    identity,
    is_positive_definite,
    matmul,
    scaled_to_hilbert,
    transition,
    weighted_estimator_kernels,
    weighted_gramian,
)
from gramdiff.kernels import build_gramian_kernel, is_identity, kernel_moment

L_, tau = sp.symbols("L tau", positive=True)


def sympy_weighted_gramian(N, m, L):
    """Direct symbolic integration over [0, L] with t1 = L (oracle)."""
    return [[sp.integrate(tau**m * (tau - L) ** (a + b) / (sp.factorial(a) * sp.factorial(b)), (tau, 0, L))
             for b in range(N + 1)] for a in range(N + 1)]


def to_sympy(mat):
    return [[sp.Rational(v.numerator, v.denominator) for v in row] for row in mat]


def test_index_convention():
    assert INDEX_BASE == 1
    # stored [0][1] is formula entry (1, 2) = -(t0 - t1)**2 / (0! 1! 2)
    assert gramian_entries(1, 0, 2).exact()[0][1] == Fraction(-2)


def test_transition_examples():
    np.testing.assert_array_equal(transition(2, 0.0).entries, np.eye(3))
    np.testing.assert_allclose(transition(2, 1.0).entries, [[1, 1, 0.5], [0, 1, 1], [0, 0, 1]])
    d = -0.3
    np.testing.assert_allclose(transition(1, d).entries, [[1, d], [0, 1]])


@pytest.mark.parametrize("N", range(0, 6))
@pytest.mark.parametrize("dt", [-1.3, 0.0, 0.7])
def test_transition_against_expm(N, dt):
    A = np.eye(N + 1, k=1)
    np.testing.assert_allclose(transition(N, dt).entries, scipy.linalg.expm(A * dt), rtol=1e-13, atol=1e-15)


def test_transition_exact():
    e = transition(3, Fraction(1, 2)).entries
    assert e[0, 3] == Fraction(1, 48)
    assert e[2, 1] == 0


def test_gramian_degree_one():
    T = Fraction(3, 2)
    W = gramian_entries(1, 0.25, 1.75).exact()
    assert W == [[T, -T**2 / 2], [-T**2 / 2, T**3 / 3]]
    assert gramian_entries(0, 2.0, 5.0).exact() == [[3]]


def test_gramian_n2_corner():
    assert gramian_entries(2, 0, 1).exact()[2][2] == Fraction(1, 20)


@pytest.mark.parametrize("N", range(0, 5))
def test_gramian_against_symbolic_integration(N):
    L = sp.Rational(7, 4)
    assert to_sympy(gramian_entries(N, 0, 1).exact(Fraction(7, 4))) == sympy_weighted_gramian(N, 0, L)


def test_inverse_degree_one():
    T = Fraction(5, 2)
    assert gramian_inverse_closed(1, 0, 2.5).exact() == [[4 / T, 6 / T**2], [6 / T**2, 12 / T**3]]
    assert gramian_inverse_closed(0, 0, 2.5).exact() == [[1 / T]]


@pytest.mark.parametrize("N", range(0, 11))
def test_inverse_identity_symbolic_length(N):
    assert gramian_times_inverse(N) == identity(N + 1)


@pytest.mark.parametrize("L", [Fraction(1), Fraction(3, 7), Fraction(11, 2)])
def test_inverse_identity_concrete_lengths(L):
    for N in range(8):
        W = gramian_entries(N, 0, 1).exact(L)
        V = gramian_inverse_closed(N, 0, 1).exact(L)
        assert matmul(W, V) == identity(N + 1)
        assert exact_inverse(W) == V


def test_hilbert_inverse_examples():
    assert hilbert_inverse(2) == [[4, -6], [-6, 12]]
    assert hilbert_inverse(1) == [[1]]
    assert hilbert_inverse(3)[0][0] == 9


@pytest.mark.parametrize("n", range(1, 12))
def test_hilbert_inverse_against_gauss_jordan(n):
    assert hilbert_inverse(n) == exact_inverse(hilbert(n))
    assert matmul(hilbert_inverse(n), hilbert(n)) == identity(n)


@pytest.mark.parametrize("N", range(0, 11))
def test_diagonal_scaling_gives_hilbert(N):
    assert hilbert_scaling_symbolic(N) == hilbert(N + 1)
    assert scaled_to_hilbert(N, Fraction(9, 4)) == hilbert(N + 1)


def test_weighted_examples():
    T = Fraction(3)
    assert weighted_gramian(1, 0, 3, WeightSpec(0)).exact() == gramian_entries(1, 0, 3).exact()
    assert weighted_gramian(0, 0, 3, WeightSpec(1)).exact() == [[T**2 / 2]]
    assert weighted_gramian(1, 0, 3, WeightSpec(1)).exact()[0][1] == -T**3 / 6


@pytest.mark.parametrize("N", range(0, 4))
@pytest.mark.parametrize("m", range(0, 4))
def test_weighted_against_symbolic_integration(N, m):
    L = sp.Rational(5, 3)
    got = to_sympy(weighted_gramian(N, 0, 1, WeightSpec(m)).exact(Fraction(5, 3)))
    assert got == sympy_weighted_gramian(N, m, L)


def test_weighted_m0_reproduces_plain():
    for N in range(11):
        assert weighted_gramian(N, 0, 1, WeightSpec(0)).normalized == gramian_entries(N, 0, 1).normalized


def test_weight_spec_validation():
    with pytest.raises(DomainError):
        WeightSpec(-1)


def test_weighted_kernel_examples():
    assert weighted_estimator_kernels(1, 1.0)[1].coeffs == (6, -12)
    assert weighted_estimator_kernels(0, 1.0)[0].coeffs == (1,)
    k = weighted_estimator_kernels(0, 1.0, WeightSpec(1))[0]
    # 2 (T - sigma) / T**2
    assert k.coeffs == (2, -2) and k.degree == 1


@pytest.mark.parametrize("N", range(0, 9))
def test_weighted_m0_equals_gramian_kernel(N):
    for j, k in enumerate(weighted_estimator_kernels(N, 1.0)):
        assert k.coeffs == build_gramian_kernel(N, j).coeffs


@pytest.mark.parametrize("m", range(0, 4))
def test_weighted_kernels_are_deadbeat(m):
    for N in range(7):
        kernels = weighted_estimator_kernels(N, 1.0, WeightSpec(m))
        mat = [[kernel_moment(k, order) for order in range(N + 1)] for k in kernels]
        assert is_identity(mat)


@pytest.mark.parametrize("bad", [(1, 1.0, 1.0), (1, 2.0, 1.0)])
def test_interval_errors(bad):
    N, t0, t1 = bad
    for fn in (gramian_entries, gramian_inverse_closed, weighted_gramian):
        with pytest.raises(DomainError):
            fn(N, t0, t1)


@pytest.mark.parametrize("N", range(0, 9))
def test_symmetric_positive_definite(N):
    for g in (gramian_entries(N, 0, 1), weighted_gramian(N, 0, 1, WeightSpec(2))):
        W = g.entries
        assert np.max(np.abs(W - W.T)) <= 1e-9
        assert is_positive_definite(W)


def test_numeric_inverse_warns_when_ill_conditioned():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gramian_inverse_numeric(gramian_entries(4, 0, 1))
    with pytest.warns(ConditioningWarning):
        gramian_inverse_numeric(gramian_entries(9, 0, 1))


def test_matrix_dump():
    d = json.loads(gramian_entries(1, 0.5, 2.5).to_json())
    assert d["N"] == 1 and d["t0"] == 0.5 and d["t1"] == 2.5 and d["m"] == 0
    assert d["entries"] == [["2/1", "-2/1"], ["-2/1", "8/3"]]
    np.testing.assert_allclose(d["float"], [[2, -2], [-2, 8 / 3]])
    d = json.loads(weighted_gramian(0, 0, 0.1, WeightSpec(1)).to_json())
    assert d["m"] == 1 and d["entries"] == [["1/200"]]
