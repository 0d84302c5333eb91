import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramdiff.errors import ConfigurationError, ExcitationError
from gramdiff.gramian import gramian_entries
from gramdiff.identifier import RegressorSeries, identify, pe_metric, regressor_gramian
from gramdiff.runtime import reconstruct_state
from gramdiff.signals import SignalSeries

ONE = lambda t: np.ones_like(t)  # noqa: E731


def test_affine_regressor_gramian_sign_pattern():
    dt, T, t = 1e-3, 0.5, 1.2
    r = RegressorSeries.from_functions([ONE, lambda t: t - 0.7], ONE, 0.0, dt, 1301)
    g = regressor_gramian(r, t - T, t)
    D = np.diag([1.0, -1.0])
    W = gramian_entries(1, t - T, t).entries
    # trapezoid error only touches the quadratic entry: T * dt**2 / 6
    np.testing.assert_allclose(g, D @ W @ D, rtol=0, atol=T * dt**2 / 6 + 1e-12)


def test_unit_regressor_gramian():
    r = RegressorSeries.from_functions([ONE, lambda t: 0 * t], ONE, 0.0, 0.01, 500)
    g = regressor_gramian(r, 1.0, 3.5)
    np.testing.assert_allclose(g, [[2.5, 0], [0, 0]], atol=1e-12)


def test_harmonic_regressor_gramian():
    n = 6000
    dt = 2 * math.pi / n
    r = RegressorSeries.from_functions([np.sin, np.cos], ONE, 0.0, dt, n + 1)
    g = regressor_gramian(r, 0.0, 2 * math.pi)
    np.testing.assert_allclose(g, math.pi * np.eye(2), rtol=0, atol=1e-6)


def test_gramian_window_errors():
    r = RegressorSeries.from_functions([ONE], ONE, 0.0, 0.1, 11)
    with pytest.raises(ConfigurationError):
        regressor_gramian(r, 0.5, 0.5)
    with pytest.raises(ConfigurationError):
        regressor_gramian(r, -0.5, 0.5)
    with pytest.raises(ConfigurationError):
        regressor_gramian(r, 0.5, 2.0)


def test_series_shape_errors():
    with pytest.raises(ConfigurationError):
        RegressorSeries(0.0, 0.1, np.ones((5, 2)), np.ones(4))
    with pytest.raises(ConfigurationError):
        RegressorSeries(0.0, 0.0, np.ones((5, 2)), np.ones(5))


def test_identify_harmonic():
    dt = 1e-3
    n = int(round(2 * math.pi / dt)) + 200
    r = RegressorSeries.from_functions(
        [np.sin, np.cos], lambda t: 2 * np.sin(t) + 3 * np.cos(t), 0.0, dt, n
    )
    res = identify(r, 2 * math.pi, 6.4)
    np.testing.assert_allclose(res.phi, [2, 3], rtol=0, atol=1e-6)
    assert res.pe_metric > 0.99


def test_identify_affine():
    r = RegressorSeries.from_functions([ONE, lambda t: t], lambda t: -1.5 + 0.25 * t, 0.0, 0.01, 401)
    res = identify(r, 1.0, 3.0)
    np.testing.assert_allclose(res.phi, [-1.5, 0.25], rtol=0, atol=1e-8)
    assert res.t == pytest.approx(3.0) and res.effective_T == pytest.approx(1.0)


def test_identify_collinear():
    r = RegressorSeries.from_functions([ONE, ONE], lambda t: 2 * t, 0.0, 0.01, 200)
    with pytest.raises(ExcitationError) as info:
        identify(r, 1.0, 1.5)
    d = info.value.direction
    # the unexcited direction is (1, -1)/sqrt(2) up to sign
    assert abs(abs(d[0]) - abs(d[1])) < 1e-9 and d[0] * d[1] < 0
    assert info.value.metric < 1e-10


def test_identify_threshold_configurable():
    r = RegressorSeries.from_functions([ONE, lambda t: 1 + 1e-4 * t], ONE, 0.0, 0.01, 200)
    identify(r, 1.0, 1.5)
    with pytest.raises(ExcitationError):
        identify(r, 1.0, 1.5, threshold=1e-3)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_specializes_to_state_reconstruction(N):
    dt, T, t1 = 1e-3, 0.5, 1.0
    y = lambda t: 0.4 - 2.0 * t  # noqa: E731
    fns = [lambda t, k=k: (t - t1) ** k / math.factorial(k) for k in range(N + 1)]
    r = RegressorSeries.from_functions(fns, y, 0.0, dt, 1201)
    phi = identify(r, T, t1).phi
    x = reconstruct_state(SignalSeries(0.0, dt, y(r.times)), N, T, t1).x
    assert np.max(np.abs(phi - x) * T ** np.arange(N + 1)) <= 1e-8


def test_noise_free_exactness_random_regressors():
    rng = np.random.default_rng(8)
    om = rng.normal(size=(500, 4))
    phi = np.array([1.0, -2.0, 0.5, 3.0])
    r = RegressorSeries(0.0, 0.01, om, om @ phi)
    np.testing.assert_allclose(identify(r, 3.0, 4.0).phi, phi, rtol=1e-6)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(-1e3, 1e3).filter(lambda a: abs(a) > 1e-3))
def test_scaling_equivariance(alpha):
    rng = np.random.default_rng(3)
    om = rng.normal(size=(300, 3))
    y = rng.normal(size=300)
    base = identify(RegressorSeries(0.0, 0.01, om, y), 2.0, 2.5).phi
    scaled = identify(RegressorSeries(0.0, 0.01, om, alpha * y), 2.0, 2.5).phi
    np.testing.assert_allclose(scaled, alpha * base, rtol=1e-12, atol=1e-12 * abs(alpha))


@pytest.mark.parametrize(
    "g, expected",
    [(np.eye(3), 1.0), ([[1, 1], [1, 1]], 0.0), ([[2, 0], [0, 1]], 2 / 3), (np.zeros((2, 2)), 0.0)],
)
def test_pe_metric_examples(g, expected):
    assert pe_metric(g) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32), p=st.integers(1, 5))
def test_pe_metric_range(seed, p):
    a = np.random.default_rng(seed).normal(size=(p, p))
    assert 0.0 <= pe_metric(a @ a.T) <= 1.0
