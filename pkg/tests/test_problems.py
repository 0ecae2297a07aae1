import mpmath
import numpy as np
import pytest

from analysis.common.problems import (
    custom_constant,
    example1,
    example2,
    get_problem,
    list_available_problems,
    riemann_liouville_bump,
)
from tsfcde.coefficients import gamma_fn
from tsfcde.errors import ConfigError

x = np.linspace(0.05, 0.95, 19)


@pytest.mark.parametrize("factory", [example1, example2])
def test_exact_starts_at_initial_data(factory):
    p = factory(0.6, 1.4)
    np.testing.assert_array_equal(p.exact(x, 0.0), p.initial(x))


def test_exact_solution_growth():
    p = example1(0.5, 1.8)
    np.testing.assert_allclose(p.exact(x, 1.0), 2.0 * p.initial(x), rtol=1e-15)


def test_second_order_limit_closed_form():
    alpha, t = 0.4, 0.7
    p = example1(alpha, 2.0)
    poly = 2 - 12 * x + 12 * x**2
    convection = 2 * (-0.1) * x * (1 - x) * (1 - 2 * x)
    expected = gamma_fn(3 + alpha) / 2 * x**2 * (1 - x) ** 2 * t**2 - (t ** (2 + alpha) + 1) * (
        convection + (0.8 + 0.5) * poly
    )
    np.testing.assert_allclose(p.source(x, t), expected, rtol=1e-12, atol=1e-14)


def test_fractional_derivative_matches_numerical_quadrature():
    beta = 1.6

    def bump(s):
        return s**2 * (1 - s) ** 2

    oracle = mpmath.differint(bump, 0.5, beta, 0)
    value = riemann_liouville_bump(np.array([0.5]), beta, 1.0, 0.0)[0]
    assert value == pytest.approx(float(oracle), rel=1e-6)
    # symmetric bump: the right-sided derivative mirrors the left one
    mirrored = riemann_liouville_bump(np.array([0.3, 0.7]), beta, 0.0, 1.0)
    left = riemann_liouville_bump(np.array([0.7, 0.3]), beta, 1.0, 0.0)
    np.testing.assert_allclose(mirrored, left, rtol=1e-13)


def test_example1_source_at_midpoint():
    alpha, beta = 0.5, 1.8
    p = example1(alpha, beta)
    t = (1 - alpha / 2) / 32
    rl = float(mpmath.differint(lambda s: s**2 * (1 - s) ** 2, 0.5, beta, 0))
    expected = float(mpmath.gamma(3 + alpha)) / 2 * 0.0625 * t**2 - (t ** (2 + alpha) + 1) * (0.8 + 0.5) * rl
    assert p.source(np.array([0.5]), t)[0] == pytest.approx(expected, rel=1e-6)


def test_example2_coefficients():
    p = example2(0.9, 1.3)
    assert not p.constant_coefficients
    assert p.gamma_t(0.3) == pytest.approx(-0.3)
    assert p.dplus_t(0.3) == pytest.approx(9 * np.sin(0.3))
    assert p.dminus_t(0.3) == pytest.approx(4 * np.sin(0.3))


def test_custom_constant_has_no_exact_solution():
    p = custom_constant(0.5, 1.5, 0.2, 1.0, 0.0)
    assert p.exact is None
    assert p.constant_coefficients
    np.testing.assert_array_equal(p.source(x, 0.4), 0.0)


def test_registry():
    assert list_available_problems() == ["example1", "example2", "custom-constant"]
    assert get_problem("example2", 0.5, 1.5).name == "example2"
    with pytest.raises(ConfigError, match="unknown problem"):
        get_problem("example3", 0.5, 1.5)
    with pytest.raises(ConfigError) as info:
        get_problem("custom-constant", 0.5, 1.5, {"gamma": 0.0, "dplus": None, "dminus": 1.0})
    assert info.value.key == "dplus"
