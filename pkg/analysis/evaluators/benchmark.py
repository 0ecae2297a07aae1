"""
Benchmark Study.

Time1: dense path (partial-pivoting LU; one factorization reused for
constant coefficients, one per level otherwise).
Time2: fast path (Gohberg-Semencul for constant coefficients, Strang-
preconditioned CGS otherwise).

Each time is the best of `repeats` runs; problem construction is excluded.
"""

import time
from dataclasses import asdict, dataclass
from typing import List

import numpy as np
import pandas as pd

from tsfcde.scheme import Grid, ProblemSpec, SolutionHistory, SolverConfig, run_problem

from .base import BaseStudy
from .convergence import validate_ladder

BENCH_COLUMNS = ["N", "M", "time_dense_s", "time_fast_s", "speedup", "iters_mean", "iters_max"]


@dataclass
class BenchmarkRecord:
    N: int
    M: int
    time_dense_s: float
    time_fast_s: float
    speedup: float
    iters_mean: float
    iters_min: int
    iters_max: int


def best_time(fn, repeats: int):
    """(best wall-clock seconds, result of the last call)."""
    best = float("inf")
    result = None
    for _ in range(repeats):
        started = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - started)
    return best, result


def iteration_stats(hist: SolutionHistory):
    iters = hist.iterations
    if iters.size == 0:
        return 0.0, 0, 0
    return float(iters.mean()), int(iters.min()), int(iters.max())


def benchmark(p: ProblemSpec, g: Grid, cfg: SolverConfig, repeats: int = 3) -> BenchmarkRecord:
    """Time the dense and fast paths on one mesh."""
    time_dense, _ = best_time(lambda: run_problem(p, g, "dense", cfg), repeats)
    time_fast, fast = best_time(lambda: run_problem(p, g, "auto", cfg), repeats)
    mean, lo, hi = iteration_stats(fast)
    return BenchmarkRecord(
        N=g.N,
        M=g.M,
        time_dense_s=time_dense,
        time_fast_s=time_fast,
        speedup=time_dense / time_fast,
        iters_mean=mean,
        iters_min=lo,
        iters_max=hi,
    )


class BenchmarkStudy(BaseStudy):
    """Dense versus fast path over a ladder with N = M."""

    def __init__(self, config, repeats: int = 3, progress: bool = False):
        super().__init__(config, progress)
        self.repeats = max(1, int(repeats))

    def run(self, ladder: List[int]) -> pd.DataFrame:
        validate_ladder(ladder, 5)
        cfg = self.config.solver_config(progress=self.progress)
        records = []
        for n in ladder:
            rec = benchmark(self.problem, self.grid(n, n), cfg, self.repeats)
            self.log(
                f"N=M={n}: dense {rec.time_dense_s:.3f}s, fast {rec.time_fast_s:.3f}s, "
                f"speedup {rec.speedup:.2f}, iterations {rec.iters_mean:.1f} [{rec.iters_min}, {rec.iters_max}]"
            )
            records.append(rec)
        table = pd.DataFrame([asdict(r) for r in records])
        return table[BENCH_COLUMNS].astype({"N": int, "M": int, "iters_max": int, "iters_mean": np.float64})
