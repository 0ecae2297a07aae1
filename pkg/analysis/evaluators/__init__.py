"""
Study module.

Provides two studies:
- ConvergenceStudy: errors and observed orders over a refinement ladder
- BenchmarkStudy: dense versus fast path timings
"""

from .base import BaseStudy
from .benchmark import BenchmarkRecord, BenchmarkStudy, benchmark
from .convergence import ConvergenceRow, ConvergenceStudy

__all__ = [
    "BaseStudy",
    "BenchmarkRecord",
    "BenchmarkStudy",
    "benchmark",
    "ConvergenceRow",
    "ConvergenceStudy",
]
