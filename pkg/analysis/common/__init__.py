from .metrics import ErrorReport, convergence_order, discrete_l2, error_report
from .problems import PROBLEM_CONFIGS, example1, example2, custom_constant, get_problem, list_available_problems
from .export import export_matrices

__all__ = [
    "ErrorReport",
    "convergence_order",
    "discrete_l2",
    "error_report",
    "PROBLEM_CONFIGS",
    "example1",
    "example2",
    "custom_constant",
    "get_problem",
    "list_available_problems",
    "export_matrices",
]
