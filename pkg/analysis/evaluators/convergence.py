"""
Convergence Study.

Runs a problem with a known exact solution over a refinement ladder and
tabulates errors and observed orders.

Modes:
- space-time: tau = h, the ladder lists N (and M = N)
- time-only: N fixed on a fine mesh, the ladder lists M
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional

import pandas as pd

from tsfcde.errors import ConfigError

from .base import BaseStudy
from ..common.metrics import ErrorReport, convergence_order, error_report
from ..common.problems import PROBLEM_CONFIGS

CONVERGENCE_COLUMNS = ["alpha", "beta", "h", "tau", "l2_error", "l2_order", "max_error", "max_order"]
MODES = ("space-time", "time-only")


@dataclass
class ConvergenceRow:
    alpha: float
    beta: float
    h: float
    tau: float
    l2_error: float
    l2_order: Optional[float]
    max_error: float
    max_order: Optional[float]


def validate_ladder(ladder: List[int], minimum: int, key: str = "ladder"):
    if not ladder:
        raise ConfigError(key, "ladder is empty")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError(key, f"ladder must be strictly ascending, got {ladder}")
    if ladder[0] < minimum:
        raise ConfigError(key, f"entries must be >= {minimum}, got {ladder[0]}")


class ConvergenceStudy(BaseStudy):
    """
    Convergence Study.

    Rows hold max_n ||E^n|| (l2_error) and the mesh maximum norm
    (max_error); orders compare each row with the previous one.
    """

    def __init__(self, config, mode: str = "space-time", workers: int = 1, fine_N: Optional[int] = None, progress: bool = False):
        super().__init__(config, progress)
        if mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {mode!r}")
        if workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {workers}")
        self.mode = mode
        self.workers = workers
        self.fine_N = fine_N or PROBLEM_CONFIGS[config.problem]["time_only_N"]

    def meshes(self, ladder: List[int]):
        """(N, M) pairs in ladder order."""
        if self.mode == "space-time":
            validate_ladder(ladder, 5)
            return [(n, n) for n in ladder]
        validate_ladder(ladder, 1)
        return [(self.fine_N, m) for m in ladder]

    def _run_one(self, mesh) -> ErrorReport:
        N, M = mesh
        grid = self.grid(N, M)
        hist = self.solve(grid)
        report = error_report(hist, self.problem.exact, grid)
        self.log(f"N={N} M={M}: l2 {report.l2_max_over_time:.4e}, max {report.max_norm:.4e} ({hist.elapsed:.2f}s)")
        return report

    def run(self, ladder: List[int]) -> pd.DataFrame:
        meshes = self.meshes(ladder)
        self.log(f"{self.problem.name} {self.mode} ladder {ladder} on {self.workers} worker(s)")
        if self.workers == 1:
            reports = [self._run_one(m) for m in meshes]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                reports = list(pool.map(self._run_one, meshes))
        return pd.DataFrame([asdict(r) for r in self.rows(meshes, reports)], columns=CONVERGENCE_COLUMNS)

    def rows(self, meshes, reports: List[ErrorReport]) -> List[ConvergenceRow]:
        cfg = self.config
        rows = []
        prev = None
        for (N, M), rep in zip(meshes, reports):
            grid = self.grid(N, M)
            l2_order = max_order = None
            if prev is not None:
                prev_grid, prev_rep = prev
                ratio = prev_grid.h / grid.h if self.mode == "space-time" else prev_grid.tau / grid.tau
                l2_order = convergence_order(prev_rep.l2_max_over_time, rep.l2_max_over_time, ratio)
                max_order = convergence_order(prev_rep.max_norm, rep.max_norm, ratio)
            rows.append(
                ConvergenceRow(
                    alpha=cfg.alpha,
                    beta=cfg.beta,
                    h=grid.h,
                    tau=grid.tau,
                    l2_error=rep.l2_max_over_time,
                    l2_order=l2_order,
                    max_error=rep.max_norm,
                    max_order=max_order,
                )
            )
            prev = (grid, rep)
        return rows

