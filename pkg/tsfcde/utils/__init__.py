from .csv_utils import read_frame, read_matrix_csv, with_boundary, write_frame, write_matrix_csv
from .log_utils import setup_logging

__all__ = [
    "read_frame",
    "read_matrix_csv",
    "with_boundary",
    "write_frame",
    "write_matrix_csv",
    "setup_logging",
]
