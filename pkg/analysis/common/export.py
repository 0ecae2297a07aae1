"""Dense operator export for spectrum studies of A and P^{-1} A."""

from pathlib import Path
from typing import Tuple

import numpy as np
from loguru import logger

from tsfcde.coefficients import shifted_weights, time_ab
from tsfcde.errors import DomainError
from tsfcde.scheme import Grid, ProblemSpec, assemble_pair, preconditioner
from tsfcde.utils.csv_utils import write_matrix_csv


def level_matrices(p: ProblemSpec, g: Grid, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """Dense A^(j+sigma) and P^{-1} A, the latter built column-wise with circulant solves."""
    if not 0 <= j <= g.M - 1:
        raise DomainError(f"level j must lie in [0, {g.M - 1}], got {j}")
    sw = shifted_weights(p.orders.beta, g.N)
    tw = time_ab(p.orders.alpha, g.M, g.tau)
    pair = assemble_pair(p, g, sw, tw, j)
    A = pair.A.dense()
    PinvA = preconditioner(pair.A).solve(A)
    return A, PinvA


def export_matrices(p: ProblemSpec, g: Grid, j: int, path: Path) -> Tuple[Path, Path]:
    """Write A_level<j>.csv and PinvA_level<j>.csv under the directory `path`."""
    A, PinvA = level_matrices(p, g, j)
    path = Path(path)
    a_path = write_matrix_csv(A, path / f"A_level{j}.csv")
    p_path = write_matrix_csv(PinvA, path / f"PinvA_level{j}.csv")
    logger.info(f"exported level {j} operators ({A.shape[0]}x{A.shape[1]}) to {path}")
    return a_path, p_path
