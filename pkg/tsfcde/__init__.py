"""Toeplitz-structured solvers for time-space fractional convection-diffusion equations."""

from .coefficients import FractionalOrders, eta, gamma_fn, grunwald_g, shifted_weights, time_ab, time_c_row
from .krylov import SolveReport, cgs
from .scheme import (
    Grid,
    OperatorPair,
    ProblemSpec,
    SolutionHistory,
    SolverConfig,
    assemble_pair,
    history_term,
    rhs,
    run_constant,
    run_problem,
    run_variable,
    sample_f,
)
from .toeplitz import CirculantOperator, DenseLU, GsfInverse, Toeplitz, dft, strang

__version__ = "0.1.0"
