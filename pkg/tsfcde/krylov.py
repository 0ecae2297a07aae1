"""
Left-preconditioned conjugate gradient squared.

cgs() solves A x = b with preconditioner P applied as P^{-1}(.), iterating
on P^{-1} A x = P^{-1} b while judging convergence on the unpreconditioned
relative residual ||b - A x|| / ||b - A x0||.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.sparse.linalg import LinearOperator

from .errors import BreakdownError, DimensionError, DivergenceError, DomainError
from .toeplitz import Toeplitz
from .utils.csv_utils import write_frame

BREAKDOWN_TOL = 1e-300
DEFAULT_TOL = 1e-12
DEFAULT_MAXIT = 1000
# iterations without halving the residual before the solve counts as stagnated
STAGNATION_WINDOW = 20


@dataclass
class SolveReport:
    """
    Outcome of one solve.

    stagnated marks a run stopped because the residual could not be reduced
    any further in double precision; the returned iterate is the best one seen.
    """

    iterations: int
    relative_residual: float
    residual_history: Tuple[float, ...] = field(repr=False)
    converged: bool
    method: str = "pcgs"
    stagnated: bool = False

    def attained(self, tol: float) -> bool:
        """Converged, or stagnated at a residual no worse than sqrt(tol)."""
        return self.converged or (self.stagnated and self.relative_residual <= np.sqrt(tol))


def as_operator(A) -> Tuple[int, Callable[[np.ndarray], np.ndarray]]:
    """
    Normalize a linear operator to (dimension, matvec).

    Accepts a Toeplitz, a scipy LinearOperator, a square ndarray, or an
    object exposing `n`/`shape` together with a callable `apply`.
    """
    if isinstance(A, Toeplitz):
        return A.n, A.matvec
    if isinstance(A, LinearOperator):
        if A.shape[0] != A.shape[1]:
            raise DimensionError(f"operator must be square, got {A.shape}")
        return A.shape[0], A.matvec
    if isinstance(A, np.ndarray):
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"operator must be square, got {A.shape}")
        return A.shape[0], A.__matmul__
    if hasattr(A, "apply"):
        n = A.n if hasattr(A, "n") else A.shape[0]
        return n, A.apply
    raise TypeError(f"unsupported operator type {type(A).__name__}")


def as_preconditioner(P) -> Callable[[np.ndarray], np.ndarray]:
    """P^{-1} action: None (identity), an object with .solve, a LinearOperator or a callable."""
    if P is None:
        return lambda v: v
    if hasattr(P, "solve"):
        return P.solve
    if isinstance(P, LinearOperator):
        return P.matvec
    if callable(P):
        return P
    raise TypeError(f"unsupported preconditioner type {type(P).__name__}")


def _check_finite(k: int, *vectors):
    for v in vectors:
        if not np.all(np.isfinite(v)):
            raise DivergenceError(f"non-finite iterate at iteration {k}", iteration=k)


def cgs(
    A,
    P,
    b,
    tol: float = DEFAULT_TOL,
    maxit: int = DEFAULT_MAXIT,
    x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, SolveReport]:
    """
    Preconditioned CGS.

    Parameters:
        A: Linear operator (see as_operator)
        P: Preconditioner or None (see as_preconditioner)
        b: Right-hand side
        tol: Relative residual tolerance on the original system
        maxit: Iteration cap
        x0: Initial guess, zero by default

    Returns:
        (x, SolveReport). Hitting maxit is reported, not raised. So is
        stagnation: STAGNATION_WINDOW iterations without halving the
        residual, or a preconditioned residual shrunk below eps * tol
        relative to P^{-1} b. The best iterate is returned, with its explicit
        residual.

    Raises:
        BreakdownError: |(r*, v)| or |(r*, r)| below 1e-300
        DivergenceError: NaN/Inf in the iterates
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    if maxit < 0:
        raise DomainError(f"maxit must be >= 0, got {maxit}")

    n, matvec = as_operator(A)
    psolve = as_preconditioner(P)
    b = np.asarray(b, dtype=float)
    if b.shape != (n,):
        raise DimensionError(f"b has shape {b.shape}, operator dimension is {n}")
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (n,):
        raise DimensionError(f"x0 has shape {x.shape}, operator dimension is {n}")

    r = b - matvec(x) if x.any() else b.copy()
    r0_norm = float(np.linalg.norm(r))
    history = [1.0]
    if r0_norm == 0.0:
        return x, SolveReport(0, 0.0, tuple(history), True)

    rt = psolve(r)  # preconditioned residual
    r_star = rt.copy()
    u = rt.copy()
    p = rt.copy()
    rho = float(r_star @ rt)
    rt_floor = np.finfo(float).eps * tol * float(np.linalg.norm(rt))
    rel = 1.0
    converged = False
    stagnated = False
    best_rel, best_x, best_k = 1.0, x.copy(), 0
    mark_rel, mark_k = 1.0, 0
    k = 0

    while k < maxit:
        if abs(rho) < BREAKDOWN_TOL:
            raise BreakdownError(f"rho = {rho:.3e} at iteration {k}", iteration=k)
        v = psolve(matvec(p))
        sigma = float(r_star @ v)
        if abs(sigma) < BREAKDOWN_TOL:
            raise BreakdownError(f"(r*, v) = {sigma:.3e} at iteration {k}", iteration=k)
        alpha = rho / sigma
        q = u - alpha * v
        uh = u + q
        x = x + alpha * uh
        w = matvec(uh)
        r = r - alpha * w
        rt = rt - alpha * psolve(w)
        k += 1
        _check_finite(k, x, r, rt)

        rel = float(np.linalg.norm(r)) / r0_norm
        if rel < tol:
            # recurrence says converged; confirm on the explicit residual
            r = b - matvec(x)
            rel = float(np.linalg.norm(r)) / r0_norm
            if rel < tol:
                history.append(rel)
                converged = True
                break
            rt = psolve(r)
            logger.debug(f"cgs: residual replaced at iteration {k}, explicit {rel:.3e}")
        history.append(rel)

        if rel < best_rel:
            best_rel, best_x, best_k = rel, x.copy(), k
        if rel < 0.5 * mark_rel:
            mark_rel, mark_k = rel, k
        if k - mark_k >= STAGNATION_WINDOW or float(np.linalg.norm(rt)) <= rt_floor:
            stagnated = True
            break

        rho_new = float(r_star @ rt)
        beta = rho_new / rho
        rho = rho_new
        u = rt + beta * q
        p = u + beta * (q + beta * p)

    if stagnated:
        x = best_x
        rel = float(np.linalg.norm(b - matvec(x))) / r0_norm
        history[-1] = rel
        converged = rel < tol
        logger.debug(f"cgs: stagnated at iteration {k}, best iterate from {best_k} at {rel:.3e}")
    if not np.isfinite(rel):
        raise DivergenceError(f"non-finite residual at iteration {k}", iteration=k)
    return x, SolveReport(k, rel, tuple(history), converged, stagnated=stagnated)


def residual_history_frame(report: SolveReport) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "iteration": np.arange(len(report.residual_history)),
            "relative_residual": np.asarray(report.residual_history, dtype=float),
        }
    )


def export_residual_history(report: SolveReport, path: Path) -> Path:
    """Write `iteration,relative_residual` rows for one solve."""
    return write_frame(residual_history_frame(report), path)
