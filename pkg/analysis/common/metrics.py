"""
Shared Metrics Calculation Module.

Provides the error measures used by every study:
- discrete_l2: discrete L2 norm sqrt(h * sum v_i^2) over interior nodes
- error_report: per-level L2 errors, their maximum over time, and the
  maximum norm over the whole space-time mesh
- convergence_order: log(E_coarse / E_fine) / log(h_coarse / h_fine)
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from tsfcde.errors import DomainError, ProblemSpecError
from tsfcde.scheme import Grid, SolutionHistory
from tsfcde.utils.csv_utils import with_boundary


@dataclass(frozen=True, eq=False)
class ErrorReport:
    l2_max_over_time: float
    max_norm: float
    per_level: np.ndarray = field(repr=False)


def discrete_l2(v: np.ndarray, h: float) -> float:
    """
    Discrete L2 norm.

    Formula: sqrt(h * sum(v_i^2))

    Parameters:
        v: Interior values
        h: Mesh width, > 0

    Returns:
        Norm value
    """
    if not h > 0:
        raise DomainError(f"h must be > 0, got {h}")
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(h * np.dot(v, v)))


def error_report(
    hist: SolutionHistory,
    exact: Optional[Callable[[np.ndarray, float], np.ndarray]],
    g: Optional[Grid] = None,
) -> ErrorReport:
    """
    Compare every stored level with the exact solution.

    E^n = u(x_i, t_n) - u_i^n for n = 0..M. The maximum norm runs over all
    mesh points including the boundary, where u_i^n = 0.

    Raises:
        ProblemSpecError: No exact solution given
    """
    if exact is None:
        raise ProblemSpecError("error_report needs an exact solution")
    g = g or hist.grid
    x = g.x_nodes
    t = g.t_levels[: hist.filled]
    exact_values = np.stack([np.broadcast_to(exact(x, tn), x.shape) for tn in t])
    err = exact_values - with_boundary(hist.levels[: hist.filled])

    per_level = np.array([discrete_l2(e[1:-1], g.h) for e in err])
    return ErrorReport(
        l2_max_over_time=float(per_level.max()),
        max_norm=float(np.abs(err).max()),
        per_level=per_level,
    )


def convergence_order(coarse_err: float, fine_err: float, ratio: float) -> float:
    """
    Observed convergence order between two refinements.

    Formula: log(coarse_err / fine_err) / log(ratio)

    Raises:
        DomainError: Non-positive errors or ratio <= 1
    """
    if not (coarse_err > 0 and fine_err > 0):
        raise DomainError(f"errors must be positive, got {coarse_err}, {fine_err}")
    if not ratio > 1:
        raise DomainError(f"ratio must be > 1, got {ratio}")
    return float(np.log(coarse_err / fine_err) / np.log(ratio))
