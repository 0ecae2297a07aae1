"""
Coefficient sequences of the discretization.

Provides:
- gamma_fn: Gamma function with a domain check
- grunwald_g: Grunwald coefficients g_k = (-1)^k binom(beta, k)
- shifted_weights: second-order weights omega_k built from g and lambda_{1,0,-1}
- time_ab / time_c_row / eta: sigma-point weights of the Caputo derivative

All returned objects are immutable after construction.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from .errors import DomainError


@dataclass(frozen=True)
class FractionalOrders:
    """Time order alpha in (0, 1] and space order beta in (1, 2]."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 1.0 < self.beta <= 2.0:
            raise DomainError(f"beta must lie in (1, 2], got {self.beta}")

    @property
    def sigma(self) -> float:
        return 1.0 - self.alpha / 2.0


@dataclass(frozen=True, eq=False)
class SpatialWeights:
    beta: float
    lambda1: float
    lambda0: float
    lambdam1: float
    g: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class TimeWeights:
    """
    Sigma-point weights for M time steps of size tau.

    a has entries a_0..a_M; b has b_0..b_M with b_0 stored as 0.
    """

    alpha: float
    sigma: float
    tau: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    gamma2ma: float

    @property
    def M(self) -> int:
        return len(self.a) - 1

    @property
    def scale(self) -> float:
        """tau^(-alpha) / Gamma(2 - alpha), the factor in front of every c row."""
        return self.tau ** (-self.alpha) / self.gamma2ma


def gamma_fn(x):
    """
    Gamma function for positive arguments.

    Parameters:
        x: Positive real (scalar or array)

    Returns:
        Gamma(x), to double precision

    Raises:
        DomainError: x <= 0 anywhere
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    out = _gamma(arr)
    return float(out) if out.ndim == 0 else out


def grunwald_g(beta: float, K: int) -> np.ndarray:
    """
    Grunwald coefficients g_0..g_K.

    Uses the recurrence g_k = (1 - (beta + 1)/k) g_{k-1}, g_0 = 1.
    """
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    k = np.arange(1, K + 1, dtype=float)
    g = np.empty(K + 1)
    g[0] = 1.0
    g[1:] = np.cumprod(1.0 - (beta + 1.0) / k)
    return g


def shifted_weights(beta: float, K: int) -> SpatialWeights:
    """
    Weights omega_0..omega_K of the second-order shifted operator.

    omega_0 = l1 g_0, omega_1 = l1 g_1 + l0 g_0,
    omega_k = l1 g_k + l0 g_{k-1} + lm1 g_{k-2} for k >= 2.
    """
    if not 1.0 < beta <= 2.0:
        raise DomainError(f"beta must lie in (1, 2], got {beta}")
    g = grunwald_g(beta, K)
    lambda1 = (beta**2 + 3 * beta + 2) / 12.0
    lambda0 = (4 - beta**2) / 6.0
    lambdam1 = (beta**2 - 3 * beta + 2) / 12.0

    omega = lambda1 * g
    omega[1:] += lambda0 * g[:-1]
    omega[2:] += lambdam1 * g[:-2]

    g.setflags(write=False)
    omega.setflags(write=False)
    return SpatialWeights(beta, lambda1, lambda0, lambdam1, g, omega)


def time_ab(alpha: float, M: int, tau: float) -> TimeWeights:
    """Closed-form a_0..a_M and b_1..b_M for sigma = 1 - alpha/2."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    if not tau > 0:
        raise DomainError(f"tau must be > 0, got {tau}")

    sigma = 1.0 - alpha / 2.0
    ell = np.arange(0, M + 1, dtype=float)
    p1 = (ell + sigma) ** (1 - alpha)  # (l + sigma)^(1-alpha)
    p2 = (ell + sigma) ** (2 - alpha)

    a = np.empty(M + 1)
    a[0] = sigma ** (1 - alpha)
    a[1:] = p1[1:] - p1[:-1]

    b = np.zeros(M + 1)
    b[1:] = (p2[1:] - p2[:-1]) / (2 - alpha) - 0.5 * (p1[1:] + p1[:-1])

    a.setflags(write=False)
    b.setflags(write=False)
    return TimeWeights(alpha, sigma, tau, a, b, gamma_fn(2 - alpha))


def time_c_row(tw: TimeWeights, j: int) -> np.ndarray:
    """Row c_0..c_j of the level-j Caputo weights."""
    if not 0 <= j <= tw.M - 1:
        raise DomainError(f"level j must lie in [0, {tw.M - 1}], got {j}")
    a, b = tw.a, tw.b
    if j == 0:
        return np.array([a[0]])
    c = np.empty(j + 1)
    c[0] = a[0] + b[1]
    c[1:j] = a[1:j] + b[2:j + 1] - b[1:j]
    c[j] = a[j] - b[j]
    return c


def eta(tw: TimeWeights, j: int) -> float:
    """Diagonal coefficient eta_j = c_0^(j) / (tau^alpha Gamma(2 - alpha))."""
    if not 0 <= j <= tw.M - 1:
        raise DomainError(f"level j must lie in [0, {tw.M - 1}], got {j}")
    c0 = tw.a[0] if j == 0 else tw.a[0] + tw.b[1]
    return float(c0 * tw.scale)
