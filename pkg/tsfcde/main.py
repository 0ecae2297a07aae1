import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from loguru import logger

# Add project root directory to Python path
# Current file: <root>/tsfcde/main.py
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from tsfcde.coefficients import grunwald_g, shifted_weights, time_ab
from tsfcde.config import RunConfig, parse_config
from tsfcde.errors import ConfigError, TsfcdeError
from tsfcde.krylov import export_residual_history
from tsfcde.scheme import run_problem, select_driver
from tsfcde.utils.csv_utils import write_frame
from tsfcde.utils.log_utils import setup_logging
from analysis.common.export import export_matrices
from analysis.common.metrics import error_report
from analysis.common.problems import problem_from_config
from analysis.evaluators import BenchmarkStudy, ConvergenceStudy

DEFAULT_LADDERS = {
    "space-time": "32,64,128,256",
    "time-only": "10,20,40",
    "bench": "32,64,128,256,512",
}
CONFIG_FLAGS = ("problem", "alpha", "beta", "N", "M", "T", "a", "b", "tol", "maxit", "solver", "output", "gamma", "dplus", "dminus")


def parse_ladder(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"ladder must be a comma-separated list of integers, got {text!r}")


def print_summary(items: dict):
    """Run summary on stdout, one `key: value` per line."""
    for key, value in items.items():
        print(f"{key}: {value}")


# =============================================================================
#  Subcommands
# =============================================================================


def cmd_solve(cfg: RunConfig, levels: Optional[List[int]] = None, full_history: bool = False, progress: bool = True) -> int:
    problem = problem_from_config(cfg)
    grid = cfg.grid()
    driver = select_driver(problem, cfg.solver)
    hist = run_problem(problem, grid, cfg.solver, cfg.solver_config(progress=progress))

    if full_history:
        frame = hist.to_frame()
    elif levels:
        frame = hist.to_frame(levels)
    else:
        frame = hist.to_frame([grid.M]).rename(columns={f"u_{grid.M}": "u"})
    out = write_frame(frame, cfg.output / f"solution_{cfg.problem}.csv")
    logger.info(f"wrote {out}")

    first = hist.reports[0]
    if first is not None and first.method == "pcgs":
        out = export_residual_history(first, cfg.output / f"residuals_{cfg.problem}.csv")
        logger.info(f"wrote {out}")

    iters = hist.iterations
    summary = {
        "problem": cfg.problem,
        "driver": f"{driver} ({hist.driver})",
        "N": grid.N,
        "M": grid.M,
        "levels": hist.filled - 1,
        "iterations_mean": f"{iters.mean():.2f}" if iters.size else "n/a",
        "iterations_max": int(iters.max()) if iters.size else "n/a",
        "elapsed_s": f"{hist.elapsed:.4f}",
    }
    if problem.exact is not None:
        rep = error_report(hist, problem.exact, grid)
        summary["l2_error"] = f"{rep.l2_max_over_time:.4e}"
        summary["max_error"] = f"{rep.max_norm:.4e}"
    print_summary(summary)
    return 0


def cmd_convergence(cfg: RunConfig, ladder: List[int], mode: str = "space-time", workers: int = 1, progress: bool = True) -> int:
    study = ConvergenceStudy(cfg, mode=mode, workers=workers, progress=progress and workers == 1)
    table = study.run(ladder)
    study.save_results(table, cfg.output, f"convergence_{cfg.problem}_{mode}.csv")
    print(table.to_string(index=False))
    return 0


def cmd_bench(cfg: RunConfig, ladder: List[int], repeats: int = 3) -> int:
    study = BenchmarkStudy(cfg, repeats=repeats)
    table = study.run(ladder)
    study.save_results(table, cfg.output, f"bench_{cfg.problem}.csv")
    print(table.to_string(index=False))
    return 0


def weights_table(alpha: float, beta: float, K: int) -> pd.DataFrame:
    """k, g_k, omega_k, a_k, b_k for k = 0..K; a, b use M = K and b_0 = 0."""
    if K < 1:
        raise ConfigError("K", f"must be >= 1, got {K}")
    tw = time_ab(alpha, K, 1.0 / K)
    return pd.DataFrame(
        {
            "k": np.arange(K + 1),
            "g": grunwald_g(beta, K),
            "omega": shifted_weights(beta, K).omega,
            "a": tw.a,
            "b": tw.b,
        }
    )


def cmd_weights(alpha: float, beta: float, K: int, output: Path) -> int:
    out = write_frame(weights_table(alpha, beta, K), Path(output) / "weights.csv")
    logger.info(f"wrote {out}")
    return 0


def cmd_export(cfg: RunConfig, level: int) -> int:
    export_matrices(problem_from_config(cfg), cfg.grid(), level, cfg.output)
    return 0


# =============================================================================
#  Argument Parsing
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML file with RunConfig keys")
    common.add_argument("--problem", type=str, default=None, help="example1, example2 or custom-constant")
    common.add_argument("--alpha", type=float, default=None, help="Time order in (0, 1]")
    common.add_argument("--beta", type=float, default=None, help="Space order in (1, 2]")
    common.add_argument("--N", type=int, default=None, help="Space subintervals (>= 5)")
    common.add_argument("--M", type=int, default=None, help="Time steps")
    common.add_argument("--T", type=float, default=None, help="Final time")
    common.add_argument("--a", type=float, default=None, help="Left end of the interval")
    common.add_argument("--b", type=float, default=None, help="Right end of the interval")
    common.add_argument("--tol", type=float, default=None, help="CGS relative residual tolerance")
    common.add_argument("--maxit", type=int, default=None, help="CGS iteration cap")
    common.add_argument("--solver", type=str, default=None, choices=["auto", "pcgs", "dense"])
    common.add_argument("--output", type=Path, default=None, help="Output directory")
    common.add_argument("--gamma", type=float, default=None, help="custom-constant convection coefficient")
    common.add_argument("--dplus", type=float, default=None, help="custom-constant left diffusion coefficient")
    common.add_argument("--dminus", type=float, default=None, help="custom-constant right diffusion coefficient")
    common.add_argument("--log-level", type=str.upper, default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(description="Time-space fractional convection-diffusion solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", parents=[common], help="Run one problem and write the solution")
    p_solve.add_argument("--levels", type=parse_ladder, default=None, help="Comma-separated levels to write")
    p_solve.add_argument("--full-history", action="store_true", help="Write every level u_0..u_M")

    p_conv = sub.add_parser("convergence", parents=[common], help="Errors and orders over a ladder")
    p_conv.add_argument("--ladder", type=parse_ladder, default=None, help="Ascending N (space-time) or M (time-only)")
    p_conv.add_argument("--mode", type=str, default="space-time", choices=["space-time", "time-only"])
    p_conv.add_argument("--workers", type=int, default=1, help="Ladder entries run concurrently")

    p_bench = sub.add_parser("bench", parents=[common], help="Dense versus fast path timings")
    p_bench.add_argument("--ladder", type=parse_ladder, default=None, help="Ascending N = M")
    p_bench.add_argument("--repeats", type=int, default=3, help="Best of this many runs")

    p_weights = sub.add_parser("weights", parents=[common], help="Write g, omega, a, b coefficients")
    p_weights.add_argument("--K", type=int, default=10, help="Largest index")

    p_export = sub.add_parser("export", parents=[common], help="Write dense A and P^-1 A at one level")
    p_export.add_argument("--level", type=int, default=0, help="Time level j")
    return parser


def run_command(args: argparse.Namespace) -> int:
    overrides = {key: getattr(args, key) for key in CONFIG_FLAGS}
    cfg = parse_config(args.config, overrides)

    if args.command == "solve":
        return cmd_solve(cfg, levels=args.levels, full_history=args.full_history)
    if args.command == "convergence":
        ladder = args.ladder or parse_ladder(DEFAULT_LADDERS[args.mode])
        return cmd_convergence(cfg, ladder, mode=args.mode, workers=args.workers)
    if args.command == "bench":
        return cmd_bench(cfg, args.ladder or parse_ladder(DEFAULT_LADDERS["bench"]), repeats=args.repeats)
    if args.command == "weights":
        return cmd_weights(cfg.alpha, cfg.beta, args.K, cfg.output)
    return cmd_export(cfg, args.level)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return run_command(args)
    except (TsfcdeError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
