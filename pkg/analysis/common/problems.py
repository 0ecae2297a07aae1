"""
Problem Configuration Module.

Manufactured-solution problems on (0, 1) x (0, 1] with exact solution
u = (t^(2+alpha) + 1) x^2 (1 - x)^2, and a constant-coefficient problem
with user constants and no source.
"""

from typing import Any, Callable, Dict, Optional

import numpy as np

from tsfcde.coefficients import FractionalOrders, gamma_fn
from tsfcde.errors import ConfigError
from tsfcde.scheme import ProblemSpec


def _bump(x):
    x = np.asarray(x, dtype=float)
    return x**2 * (1.0 - x) ** 2


def manufactured_exact(alpha: float) -> Callable[[np.ndarray, float], np.ndarray]:
    def exact(x, t):
        return (t ** (2.0 + alpha) + 1.0) * _bump(x)

    return exact


def riemann_liouville_bump(x, beta: float, dplus: float, dminus: float) -> np.ndarray:
    """d+ D_+^beta + d- D_-^beta applied to x^2 (1 - x)^2 on (0, 1)."""
    x = np.asarray(x, dtype=float)
    y = 1.0 - x
    total = np.zeros_like(x)
    for k, coef in ((2, 1.0), (3, -2.0), (4, 1.0)):
        ratio = coef * gamma_fn(k + 1.0) / gamma_fn(k + 1.0 - beta)
        total += ratio * (dplus * x ** (k - beta) + dminus * y ** (k - beta))
    return total


def manufactured_source(alpha: float, beta: float, gamma_t, dplus_t, dminus_t):
    """f = D_t^alpha u - gamma u_x - d+ D_+^beta u - d- D_-^beta u for the manufactured u."""
    caputo = gamma_fn(3.0 + alpha) / 2.0

    def source(x, t):
        x = np.asarray(x, dtype=float)
        time_factor = t ** (2.0 + alpha) + 1.0
        space = 2.0 * gamma_t(t) * x * (1.0 - x) * (1.0 - 2.0 * x)
        space = space + riemann_liouville_bump(x, beta, dplus_t(t), dminus_t(t))
        return caputo * _bump(x) * t**2 - time_factor * space

    return source


def example1(alpha: float, beta: float) -> ProblemSpec:
    """d+ = 0.8, d- = 0.5, gamma = -0.1."""
    orders = FractionalOrders(alpha, beta)

    def gamma_t(t):
        return -0.1

    def dplus_t(t):
        return 0.8

    def dminus_t(t):
        return 0.5

    return ProblemSpec(
        orders=orders,
        gamma_t=gamma_t,
        dplus_t=dplus_t,
        dminus_t=dminus_t,
        source=manufactured_source(alpha, beta, gamma_t, dplus_t, dminus_t),
        initial=_bump,
        exact=manufactured_exact(alpha),
        constant_coefficients=True,
        name="example1",
    )


def example2(alpha: float, beta: float) -> ProblemSpec:
    """d+ = 9 sin t, d- = 4 sin t, gamma = -t."""
    orders = FractionalOrders(alpha, beta)

    def gamma_t(t):
        return -t

    def dplus_t(t):
        return 9.0 * np.sin(t)

    def dminus_t(t):
        return 4.0 * np.sin(t)

    return ProblemSpec(
        orders=orders,
        gamma_t=gamma_t,
        dplus_t=dplus_t,
        dminus_t=dminus_t,
        source=manufactured_source(alpha, beta, gamma_t, dplus_t, dminus_t),
        initial=_bump,
        exact=manufactured_exact(alpha),
        constant_coefficients=False,
        name="example2",
    )


def custom_constant(alpha: float, beta: float, gamma: float, dplus: float, dminus: float) -> ProblemSpec:
    """Constant coefficients, f = 0, phi = x^2 (1 - x)^2; no exact solution."""
    return ProblemSpec(
        orders=FractionalOrders(alpha, beta),
        gamma_t=lambda t: gamma,
        dplus_t=lambda t: dplus,
        dminus_t=lambda t: dminus,
        source=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
        initial=_bump,
        exact=None,
        constant_coefficients=True,
        name="custom-constant",
    )


# Problem registry: factory plus the fixed fine mesh of the time-only study
PROBLEM_CONFIGS: Dict[str, Dict[str, Any]] = {
    "example1": {
        "factory": example1,
        "description": "Constant coefficients, manufactured solution",
        "time_only_N": 1000,
    },
    "example2": {
        "factory": example2,
        "description": "Variable coefficients, manufactured solution",
        "time_only_N": 1200,
    },
    "custom-constant": {
        "factory": custom_constant,
        "description": "User constants, zero source",
        "time_only_N": 1000,
    },
}


def get_problem(name: str, alpha: float, beta: float, constants: Optional[Dict[str, float]] = None) -> ProblemSpec:
    """
    Build a registered problem.

    Parameters:
        name: example1 / example2 / custom-constant
        alpha, beta: Fractional orders
        constants: gamma, dplus, dminus for custom-constant

    Raises:
        ConfigError: Unknown name or missing constants
    """
    if name not in PROBLEM_CONFIGS:
        raise ConfigError("problem", f"unknown problem {name!r}, available options: {list(PROBLEM_CONFIGS.keys())}")
    factory = PROBLEM_CONFIGS[name]["factory"]
    if name == "custom-constant":
        constants = constants or {}
        missing = [k for k in ("gamma", "dplus", "dminus") if constants.get(k) is None]
        if missing:
            raise ConfigError(missing[0], "required by custom-constant")
        return factory(alpha, beta, constants["gamma"], constants["dplus"], constants["dminus"])
    return factory(alpha, beta)


def problem_from_config(cfg) -> ProblemSpec:
    """ProblemSpec for a RunConfig."""
    return get_problem(cfg.problem, cfg.alpha, cfg.beta, {"gamma": cfg.gamma, "dplus": cfg.dplus, "dminus": cfg.dminus})


def list_available_problems() -> list:
    return list(PROBLEM_CONFIGS.keys())
