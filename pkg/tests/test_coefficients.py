import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsfcde.coefficients import (
    FractionalOrders,
    eta,
    gamma_fn,
    grunwald_g,
    shifted_weights,
    time_ab,
    time_c_row,
)
from tsfcde.errors import DomainError

alphas = st.floats(min_value=0.05, max_value=1.0)
betas = st.floats(min_value=1.05, max_value=2.0)


@pytest.mark.parametrize("x", [0.5, 1.3, 2.5, 4.2, 7.0])
def test_gamma_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)


def test_gamma_on_arrays():
    np.testing.assert_allclose(gamma_fn(np.array([1.0, 2.0, 5.0])), [1.0, 1.0, 24.0], rtol=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_rejects_non_positive(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def test_orders_validate_ranges():
    assert FractionalOrders(0.5, 1.8).sigma == pytest.approx(0.75)
    with pytest.raises(DomainError, match=r"\(0, 1\]"):
        FractionalOrders(1.5, 1.8)
    with pytest.raises(DomainError, match=r"\(1, 2\]"):
        FractionalOrders(0.5, 1.0)


def test_grunwald_matches_binomial_oracle():
    beta, K = 1.3, 50
    g = grunwald_g(beta, K)
    oracle = [float((-1) ** k * mpmath.binomial(beta, k)) for k in range(K + 1)]
    np.testing.assert_allclose(g, oracle, rtol=1e-13)


@given(betas)
def test_grunwald_signs(beta):
    g = grunwald_g(beta, 40)
    assert g[0] == 1.0
    assert g[1] == pytest.approx(-beta)
    assert np.all(g[2:] >= 0)
    assert np.all(np.diff(g[2:]) <= 0)
    # partial sums stay non-positive (zero from k = 2 on at beta = 2)
    assert np.all(np.cumsum(g)[1:] <= 1e-14)


def test_grunwald_negative_k():
    with pytest.raises(DomainError):
        grunwald_g(1.5, -1)


def test_shifted_weights_reference_values():
    sw = shifted_weights(1.8, 10)
    assert sw.omega[0] == pytest.approx(0.8866667, abs=1e-7)
    assert sw.omega[1] == pytest.approx(-1.4693333, abs=1e-7)
    assert shifted_weights(1.5, 4).omega[1] == pytest.approx(-0.8020833, abs=1e-7)


def test_shifted_weights_at_beta_two_is_second_difference():
    np.testing.assert_allclose(shifted_weights(2.0, 4).omega, [1.0, -2.0, 1.0, 0.0, 0.0], atol=1e-15)


@given(betas)
def test_shifted_weights_properties(beta):
    omega = shifted_weights(beta, 200).omega
    assert omega[1] < 0
    assert np.all(omega[3:] >= -1e-14)
    assert omega[0] + omega[2] >= 0
    assert np.all(np.cumsum(omega)[2:] <= 1e-14)


def test_shifted_weights_are_read_only():
    sw = shifted_weights(1.5, 5)
    with pytest.raises(ValueError):
        sw.omega[0] = 1.0


def test_b1_matches_mpmath():
    alpha = mpmath.mpf("0.5")
    sigma = 1 - alpha / 2
    b1 = ((1 + sigma) ** (2 - alpha) - sigma ** (2 - alpha)) / (2 - alpha) - (
        (1 + sigma) ** (1 - alpha) + sigma ** (1 - alpha)
    ) / 2
    tw = time_ab(0.5, 4, 0.25)
    assert tw.b[1] == pytest.approx(float(b1), rel=1e-13)
    assert tw.b[1] == pytest.approx(0.01589, abs=1e-5)
    assert tw.b[0] == 0.0


@given(alphas, st.integers(min_value=0, max_value=60))
def test_c_row_sums_telescope(alpha, j):
    tw = time_ab(alpha, 64, 1 / 64)
    c = time_c_row(tw, j)
    sigma = 1 - alpha / 2
    assert c.sum() == pytest.approx((j + sigma) ** (1 - alpha), rel=1e-11)


@given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=1, max_value=60))
def test_c_row_positive_and_decreasing(alpha, j):
    c = time_c_row(time_ab(alpha, 64, 1 / 64), j)
    assert np.all(c > 0)
    assert np.all(np.diff(c) < 0)


def test_c_row_level_zero_is_a0():
    tw = time_ab(0.3, 8, 0.125)
    np.testing.assert_array_equal(time_c_row(tw, 0), [tw.a[0]])


def test_crank_nicolson_weights_at_alpha_one():
    tw = time_ab(1.0, 3, 1 / 3)
    np.testing.assert_allclose(tw.a, [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(tw.b, 0.0, atol=1e-15)
    assert eta(tw, 0) == pytest.approx(3.0)
    assert eta(tw, 2) == pytest.approx(3.0)


def test_eta_uses_c0():
    tw = time_ab(0.5, 10, 0.1)
    scale = 0.1**-0.5 / float(mpmath.gamma(1.5))
    assert eta(tw, 0) == pytest.approx(tw.a[0] * scale, rel=1e-13)
    assert eta(tw, 3) == pytest.approx((tw.a[0] + tw.b[1]) * scale, rel=1e-13)


@pytest.mark.parametrize(
    "args",
    [(1.5, 4, 0.1), (0.0, 4, 0.1), (0.5, 0, 0.1), (0.5, 4, 0.0)],
)
def test_time_ab_domain(args):
    with pytest.raises(DomainError):
        time_ab(*args)


def test_level_out_of_range():
    tw = time_ab(0.5, 4, 0.25)
    with pytest.raises(DomainError):
        time_c_row(tw, 4)
    with pytest.raises(DomainError):
        eta(tw, -1)
