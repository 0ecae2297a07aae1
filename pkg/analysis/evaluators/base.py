"""
Base study class.

Defines the abstract interface for studies that run a problem over a
ladder of meshes and tabulate the outcome.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional

import pandas as pd
from loguru import logger

from tsfcde.config import RunConfig
from tsfcde.scheme import Grid, ProblemSpec, SolutionHistory, run_problem
from tsfcde.utils.csv_utils import write_frame

from ..common.problems import problem_from_config


class BaseStudy(ABC):
    """
    Abstract base class for studies.

    All studies must implement the run method.
    """

    def __init__(self, config: RunConfig, progress: bool = False):
        """
        Initialize the study.

        Args:
            config: Validated run configuration (problem, orders, solver)
            progress: Show per-level progress bars
        """
        self.config = config
        self.progress = progress
        self.problem: ProblemSpec = problem_from_config(config)

    @abstractmethod
    def run(self, ladder: List[int]) -> pd.DataFrame:
        """
        Run the study over a ladder of mesh sizes.

        Args:
            ladder: Ascending mesh sizes

        Returns:
            One table row per ladder entry
        """
        pass

    def grid(self, N: int, M: int) -> Grid:
        cfg = self.config
        return Grid(N=N, M=M, T=cfg.T, a=cfg.a, b=cfg.b)

    def solve(self, grid: Grid, solver: Optional[str] = None) -> SolutionHistory:
        return run_problem(
            self.problem,
            grid,
            solver or self.config.solver,
            self.config.solver_config(progress=self.progress),
        )

    def save_results(self, results: pd.DataFrame, output_dir: Path, filename: str) -> Path:
        """
        Save a study table as CSV.

        Args:
            results: Study table
            output_dir: Output directory
            filename: Output filename

        Returns:
            Path to the saved file
        """
        output_path = write_frame(results, Path(output_dir) / filename)
        self.log(f"wrote {output_path}", level="success")
        return output_path

    def log(self, message: str, level: str = "info"):
        """Study log output on stderr."""
        logger.opt(depth=1).log(level.upper(), message)
