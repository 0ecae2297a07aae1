"""
Time stepping for the time-space fractional convection-diffusion equation

    D_t^alpha u = gamma(t) u_x + d+(t) D_+^beta u + d-(t) D_-^beta u + f(x, t)

on (a, b) x (0, T] with u(a, t) = u(b, t) = 0 and u(x, 0) = phi(x).

Every level solves A^(j+sigma) u^{j+1} = B^(j+sigma) u^j - H^j + f^(j+sigma),
where A and B are Toeplitz. run_variable re-assembles A per level and solves
it with Strang-preconditioned CGS; run_constant reuses one A for j >= 1 and
applies its Gohberg-Semencul inverse.
"""

import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, List, Optional, Union

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

from .coefficients import (
    FractionalOrders,
    SpatialWeights,
    TimeWeights,
    shifted_weights,
    time_ab,
    time_c_row,
    eta,
)
from .errors import (
    DimensionError,
    DivergenceError,
    DomainError,
    GsfInapplicableError,
    ProblemSpecError,
    SingularOperatorError,
    SteppingError,
    TsfcdeError,
)
from .krylov import SolveReport, cgs
from .toeplitz import CirculantOperator, DenseLU, GsfInverse, Toeplitz, gershgorin_check, strang
from .utils.csv_utils import read_frame, with_boundary, write_frame

SOLVER_METHODS = ("pcgs", "dense")


@dataclass(frozen=True)
class Grid:
    """Uniform space-time mesh; only the N-1 interior nodes carry unknowns."""

    N: int
    M: int
    T: float = 1.0
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.N < 5:
            raise DomainError(f"N must be >= 5, got {self.N}")
        if self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")
        if not self.b > self.a:
            raise DomainError(f"need a < b, got a={self.a}, b={self.b}")
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.N

    @property
    def tau(self) -> float:
        return self.T / self.M

    @property
    def n(self) -> int:
        return self.N - 1

    @property
    def x_nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.N + 1)

    @property
    def x_interior(self) -> np.ndarray:
        return self.x_nodes[1:-1]

    @property
    def t_levels(self) -> np.ndarray:
        return self.tau * np.arange(self.M + 1)

    def t_stage(self, j: int, sigma: float) -> float:
        """t_{j+sigma} = (j + sigma) tau."""
        return (j + sigma) * self.tau


@dataclass(frozen=True)
class ProblemSpec:
    """
    Coefficients, data and (optionally) the exact solution of one problem.

    gamma_t, dplus_t, dminus_t take a scalar t; source takes (x array, t)
    and initial takes an x array.
    """

    orders: FractionalOrders
    gamma_t: Callable[[float], float]
    dplus_t: Callable[[float], float]
    dminus_t: Callable[[float], float]
    source: Callable[[np.ndarray, float], np.ndarray]
    initial: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    constant_coefficients: bool = False
    name: str = "custom"


@dataclass(frozen=True)
class SolverConfig:
    method: str = "pcgs"
    tol: float = 1e-12
    maxit: int = 1000
    progress: bool = False

    def __post_init__(self):
        if self.method not in SOLVER_METHODS:
            raise DomainError(f"method must be one of {SOLVER_METHODS}, got {self.method!r}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.maxit < 1:
            raise DomainError(f"maxit must be >= 1, got {self.maxit}")


@dataclass(frozen=True, eq=False)
class OperatorPair:
    A: Toeplitz
    B: Toeplitz
    eta: float
    level: int
    sigma: float

    def identity_defect(self) -> float:
        """
        max |(1 - sigma) A + sigma B - eta I|, relative to max(1, max|B - A|).

        B - A is the spatial operator, so the ratio measures rounding only.
        """
        combo = (1.0 - self.sigma) * self.A + self.sigma * self.B
        defect = np.concatenate([combo.col, combo.row[1:]])
        defect[0] -= self.eta
        L = self.B - self.A
        scale = max(1.0, float(np.max(np.abs(np.concatenate([L.col, L.row])))))
        return float(np.max(np.abs(defect))) / scale


@dataclass(eq=False)
class SolutionHistory:
    """
    Interior values u^0..u^M as an (M+1, N-1) array with per-level reports.

    reports[j] describes the solve that produced u^{j+1}; setup_reports holds
    the two generator solves of the Gohberg-Semencul path.
    """

    grid: Grid
    levels: np.ndarray = field(repr=False)
    reports: List[Optional[SolveReport]] = field(default_factory=list, repr=False)
    setup_reports: List[SolveReport] = field(default_factory=list, repr=False)
    driver: str = ""
    elapsed: float = 0.0
    filled: int = 1

    @classmethod
    def start(cls, grid: Grid, u0: np.ndarray, driver: str = "") -> "SolutionHistory":
        u0 = np.asarray(u0, dtype=float)
        if u0.shape != (grid.n,):
            raise DimensionError(f"u0 has shape {u0.shape}, expected ({grid.n},)")
        if not np.all(np.isfinite(u0)):
            raise DivergenceError("initial values are not finite", iteration=0)
        levels = np.zeros((grid.M + 1, grid.n))
        levels[0] = u0
        return cls(grid, levels, [None] * grid.M, [], driver)

    def store(self, j: int, u: np.ndarray, report: SolveReport):
        """Record u^j (j >= 1) and the report of the solve that produced it."""
        if j != self.filled:
            raise DomainError(f"levels are stored in order; expected {self.filled}, got {j}")
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"level {j} holds non-finite values", iteration=report.iterations)
        self.levels[j] = u
        self.reports[j - 1] = report
        self.filled = j + 1

    @property
    def final(self) -> np.ndarray:
        return self.levels[self.filled - 1]

    @property
    def iterations(self) -> np.ndarray:
        """Krylov iteration counts of every PCGS solve, generator solves included."""
        solves = [r for r in self.setup_reports + self.reports if r is not None and r.method == "pcgs"]
        return np.array([r.iterations for r in solves], dtype=int)

    def to_frame(self, levels: Optional[List[int]] = None) -> pd.DataFrame:
        """Columns x, u_<j>... over all N+1 nodes; boundary zeros reattached."""
        if levels is None:
            levels = list(range(self.filled))
        for j in levels:
            if not 0 <= j < self.filled:
                raise DomainError(f"level {j} is outside 0..{self.filled - 1}")
        data = {"x": self.grid.x_nodes}
        for j in levels:
            data[f"u_{j}"] = with_boundary(self.levels[j])
        return pd.DataFrame(data)

    @classmethod
    def from_frame(cls, df: pd.DataFrame, grid: Grid) -> "SolutionHistory":
        """Rebuild a full history from a to_frame() table with all M+1 levels."""
        cols = [f"u_{j}" for j in range(grid.M + 1)]
        missing = [c for c in cols if c not in df.columns]
        if missing or len(df) != grid.N + 1:
            raise DimensionError(
                f"table does not hold a full history for N={grid.N}, M={grid.M} (missing {missing[:3]})"
            )
        levels = df[cols].to_numpy(dtype=float).T[:, 1:-1].copy()
        hist = cls(grid, levels, [None] * grid.M, [], "csv", filled=grid.M + 1)
        return hist


def write_solution_csv(hist: SolutionHistory, path: Path, levels: Optional[List[int]] = None) -> Path:
    return write_frame(hist.to_frame(levels), path)


def read_solution_csv(path: Path, grid: Grid) -> SolutionHistory:
    return SolutionHistory.from_frame(read_frame(path), grid)


def convection_operator(n: int) -> Toeplitz:
    """Q: central difference stencil (-1, 0, 1), skew-symmetric."""
    col = np.zeros(n)
    row = np.zeros(n)
    col[1] = -1.0
    row[1] = 1.0
    return Toeplitz(col, row)


def fractional_operator(sw: SpatialWeights, n: int) -> Toeplitz:
    """W_beta: lower Hessenberg, diagonal omega_1, superdiagonal omega_0."""
    if len(sw.omega) < n + 1:
        raise DomainError(f"spatial weights cover {len(sw.omega)} entries, need {n + 1}")
    col = sw.omega[1:n + 1]
    row = np.zeros(n)
    row[0] = sw.omega[1]
    row[1] = sw.omega[0]
    return Toeplitz(col, row)


def spatial_operator(gamma: float, dplus: float, dminus: float, h: float, sw: SpatialWeights, n: int) -> Toeplitz:
    """gamma/(2h) Q + d+/h^beta W + d-/h^beta W^T."""
    W = fractional_operator(sw, n)
    hb = h**sw.beta
    return (gamma / (2.0 * h)) * convection_operator(n) + (dplus / hb) * W + (dminus / hb) * W.T


def sample_coefficients(p: ProblemSpec, t: float):
    gamma = float(p.gamma_t(t))
    dplus = float(p.dplus_t(t))
    dminus = float(p.dminus_t(t))
    if dplus < 0 or dminus < 0:
        raise ProblemSpecError(f"diffusion coefficients must be non-negative, got d+={dplus}, d-={dminus} at t={t}")
    return gamma, dplus, dminus


def assemble_pair(p: ProblemSpec, g: Grid, sw: SpatialWeights, tw: TimeWeights, j: int) -> OperatorPair:
    """
    A = eta_j I - sigma L and B = eta_j I + (1 - sigma) L at t_{j+sigma}.

    Raises:
        DomainError: j outside [0, M-1] or sw too short
        ProblemSpecError: d+ or d- negative at t_{j+sigma}
    """
    if len(sw.omega) < g.N + 1:
        raise DomainError(f"spatial weights must cover indices 0..{g.N}, got {len(sw.omega) - 1}")
    sigma = tw.sigma
    eta_j = eta(tw, j)
    gamma, dplus, dminus = sample_coefficients(p, g.t_stage(j, sigma))
    L = spatial_operator(gamma, dplus, dminus, g.h, sw, g.n)
    I = Toeplitz.identity(g.n)
    A = eta_j * I - sigma * L
    B = eta_j * I + (1.0 - sigma) * L
    return OperatorPair(A, B, eta_j, j, sigma)


def history_weights(c_row: np.ndarray, j: int) -> np.ndarray:
    """
    Weights w_0..w_j with sum_s c_{j-s}(u^{s+1} - u^s) = sum_s w_s u^s.

    w_0 = -c_j, w_s = c_{j-s+1} - c_{j-s}, w_j = c_1.
    """
    d = np.asarray(c_row, dtype=float)[j:0:-1]
    w = np.zeros(j + 1)
    w[1:] += d
    w[:-1] -= d
    return w


def history_term(tw: TimeWeights, c_row, hist: Union[SolutionHistory, np.ndarray], j: int) -> np.ndarray:
    """
    H = tau^(-alpha)/Gamma(2-alpha) sum_{s=0}^{j-1} c_{j-s} (u^{s+1} - u^s).

    The caller subtracts H on the right-hand side.
    """
    if j < 1:
        raise DomainError(f"history term needs j >= 1, got {j}")
    if len(c_row) < j + 1:
        raise DimensionError(f"c row has {len(c_row)} entries, need {j + 1}")
    levels = hist.levels if isinstance(hist, SolutionHistory) else np.asarray(hist, dtype=float)
    if isinstance(hist, SolutionHistory) and hist.filled < j + 1:
        raise DomainError(f"history holds levels 0..{hist.filled - 1}, need 0..{j}")
    return tw.scale * (history_weights(c_row, j) @ levels[: j + 1])


def rhs(pair: OperatorPair, hist: Union[SolutionHistory, np.ndarray], H: Optional[np.ndarray], f_vec) -> np.ndarray:
    """g = B u^j - H + f. `hist` may be a history (u^j read at pair.level) or u^j itself."""
    u_j = hist.levels[pair.level] if isinstance(hist, SolutionHistory) else np.asarray(hist, dtype=float)
    f_vec = np.asarray(f_vec, dtype=float)
    if u_j.shape != (pair.B.n,) or f_vec.shape != (pair.B.n,):
        raise DimensionError(f"rhs expects vectors of length {pair.B.n}")
    g = pair.B.matvec(u_j) + f_vec
    if H is not None:
        g -= H
    return g


def sample_f(p: ProblemSpec, g: Grid, j: int) -> np.ndarray:
    """f at the interior nodes and t_{j+sigma}."""
    if not 0 <= j <= g.M - 1:
        raise DomainError(f"level j must lie in [0, {g.M - 1}], got {j}")
    t = g.t_stage(j, p.orders.sigma)
    return np.broadcast_to(np.asarray(p.source(g.x_interior, t), dtype=float), (g.n,)).copy()


def _relative_residual(A: Toeplitz, u: np.ndarray, g: np.ndarray) -> float:
    g_norm = float(np.linalg.norm(g))
    r_norm = float(np.linalg.norm(g - A.matvec(u)))
    return r_norm / g_norm if g_norm > 0 else r_norm


def _direct_report(A: Toeplitz, u: np.ndarray, g: np.ndarray, method: str, tol: float) -> SolveReport:
    rel = _relative_residual(A, u, g)
    return SolveReport(0, rel, (1.0, rel), bool(rel < tol), method)


def preconditioner(A: Toeplitz) -> CirculantOperator:
    """Strang circulant of A; raises if it is numerically singular."""
    P = strang(A)
    k = P.singular_index()
    if k is not None:
        raise SingularOperatorError(f"Strang preconditioner is singular at eigenvalue {k}", index=k)
    return P


def _pcgs(A: Toeplitz, g: np.ndarray, cfg: SolverConfig, what: str, P: Optional[CirculantOperator] = None):
    P = preconditioner(A) if P is None else P
    u, report = cgs(A, P, g, tol=cfg.tol, maxit=cfg.maxit)
    if report.stagnated and not report.converged:
        logger.warning(
            f"{what}: CGS stagnated at {report.relative_residual:.3e} after {report.iterations} iterations; "
            f"tol {cfg.tol:g} is below the attainable accuracy"
        )
    elif not report.converged:
        logger.warning(f"{what}: CGS stopped after {report.iterations} iterations at {report.relative_residual:.3e}")
    else:
        logger.debug(f"{what}: {report.iterations} iterations, residual {report.relative_residual:.3e}")
    return u, report


def _check_weights(sw: SpatialWeights, g: Grid):
    W = fractional_operator(sw, g.n)
    C = strang(W)
    ok = gershgorin_check(C)
    logger.debug(
        f"Strang(W_beta) at beta={sw.beta}, N={g.N}: disc check {ok}, max Re {C.eigs.real.max():.3e}, "
        f"max |lambda| {np.abs(C.eigs).max():.3e} vs 2|omega_1| {2 * abs(sw.omega[1]):.3e}"
    )
    return ok


def _prepare(p: ProblemSpec, g: Grid, driver: str):
    sw = shifted_weights(p.orders.beta, g.N)
    tw = time_ab(p.orders.alpha, g.M, g.tau)
    hist = SolutionHistory.start(g, np.asarray(p.initial(g.x_interior), dtype=float), driver)
    _check_weights(sw, g)
    return sw, tw, hist


def run_variable(p: ProblemSpec, g: Grid, cfg: Optional[SolverConfig] = None) -> SolutionHistory:
    """
    Advance all M levels, re-assembling A and B at every t_{j+sigma}.

    cfg.method "pcgs" solves with Strang-preconditioned CGS (zero initial
    guess per level); "dense" factorizes each A with partial-pivoting LU.

    Raises:
        SteppingError: wraps any toolkit error, tagged with the level
    """
    cfg = cfg or SolverConfig()
    started = time.perf_counter()
    sw, tw, hist = _prepare(p, g, f"variable-{cfg.method}")
    logger.info(f"run_variable: {p.name} N={g.N} M={g.M} alpha={p.orders.alpha} beta={p.orders.beta} ({cfg.method})")

    for j in tqdm(range(g.M), desc=f"{p.name} levels", disable=not cfg.progress):
        try:
            pair = assemble_pair(p, g, sw, tw, j)
            H = history_term(tw, time_c_row(tw, j), hist, j) if j >= 1 else None
            g_vec = rhs(pair, hist, H, sample_f(p, g, j))
            if cfg.method == "dense":
                u = DenseLU(pair.A.dense()).solve(g_vec)
                report = _direct_report(pair.A, u, g_vec, "dense", cfg.tol)
            else:
                u, report = _pcgs(pair.A, g_vec, cfg, f"level {j}")
            hist.store(j + 1, u, report)
        except TsfcdeError as e:
            raise SteppingError(j, e) from e

    hist.elapsed = time.perf_counter() - started
    return hist


def run_constant(p: ProblemSpec, g: Grid, cfg: Optional[SolverConfig] = None) -> SolutionHistory:
    """
    Constant-coefficient driver.

    Level 0 is solved on A^(sigma). For j >= 1 the matrix A is the same at
    every level: with cfg.method "pcgs" its Gohberg-Semencul inverse is built
    from two preconditioned solves A x = e_1, A y = e_n and applied with four
    triangular Toeplitz products; if that fails, every level falls back to
    PCGS. With "dense" one LU factorization of A is reused.
    """
    if not p.constant_coefficients:
        raise ProblemSpecError(f"problem {p.name!r} does not have constant coefficients")
    cfg = cfg or SolverConfig()
    started = time.perf_counter()
    driver = "constant-dense" if cfg.method == "dense" else "constant-gsf"
    sw, tw, hist = _prepare(p, g, driver)
    logger.info(f"run_constant: {p.name} N={g.N} M={g.M} alpha={p.orders.alpha} beta={p.orders.beta} ({driver})")

    levels = tqdm(range(g.M), desc=f"{p.name} levels", disable=not cfg.progress)
    solve = None
    for j in levels:
        try:
            pair = assemble_pair(p, g, sw, tw, j) if j <= 1 else replace(pair, level=j)
            if j == 1:
                solve = _constant_solver(hist, pair, cfg)
            H = history_term(tw, time_c_row(tw, j), hist, j) if j >= 1 else None
            g_vec = rhs(pair, hist, H, sample_f(p, g, j))
            if j == 0:
                if cfg.method == "dense":
                    u = DenseLU(pair.A.dense()).solve(g_vec)
                    report = _direct_report(pair.A, u, g_vec, "dense", cfg.tol)
                else:
                    u, report = _pcgs(pair.A, g_vec, cfg, "level 0")
            else:
                u, report = solve(g_vec, j)
            hist.store(j + 1, u, report)
        except TsfcdeError as e:
            raise SteppingError(j, e) from e

    hist.elapsed = time.perf_counter() - started
    return hist


def _constant_solver(hist: SolutionHistory, pair: OperatorPair, cfg: SolverConfig):
    """Per-level solve for the shared matrix A of levels j >= 1."""
    A = pair.A
    if cfg.method == "dense":
        lu = DenseLU(A.dense())

        def solve_lu(g_vec, j):
            u = lu.solve(g_vec)
            return u, _direct_report(A, u, g_vec, "dense", cfg.tol)

        return solve_lu

    P = preconditioner(A)
    gsf = build_gsf(A, P, cfg, hist.setup_reports)
    if gsf is None:
        hist.driver = "constant-pcgs"

        def solve_pcgs(g_vec, j):
            return _pcgs(A, g_vec, cfg, f"level {j}", P)

        return solve_pcgs

    def solve_gsf(g_vec, j):
        u = gsf.apply(g_vec)
        return u, _direct_report(A, u, g_vec, "gsf", cfg.tol)

    return solve_gsf


def build_gsf(A: Toeplitz, P: CirculantOperator, cfg: SolverConfig, reports: Optional[list] = None) -> Optional[GsfInverse]:
    """
    Solve A x = e_1 and A y = e_n with PCGS and build the GSF inverse.

    Generators that stagnate at a residual below sqrt(tol) are accepted.
    Returns None (after a warning) when they fall short of that or xi_0
    vanishes.
    """
    n = A.n
    e1 = np.zeros(n)
    e1[0] = 1.0
    en = np.zeros(n)
    en[-1] = 1.0
    x, rep_x = _pcgs(A, e1, cfg, "GSF generator x", P)
    y, rep_y = _pcgs(A, en, cfg, "GSF generator y", P)
    if reports is not None:
        reports.extend([rep_x, rep_y])
    if not (rep_x.attained(cfg.tol) and rep_y.attained(cfg.tol)):
        logger.warning("GSF generators did not converge; falling back to PCGS per level")
        return None
    try:
        return GsfInverse.build(A, x, y)
    except GsfInapplicableError as e:
        logger.warning(f"GSF inapplicable ({e}); falling back to PCGS per level")
        return None


def select_driver(p: ProblemSpec, solver: str = "auto") -> str:
    """
    Driver name for a solver choice.

    auto: GSF path for constant coefficients, PCGS otherwise.
    dense: LU reuse for constant coefficients, per-level LU otherwise.
    pcgs: per-level PCGS for every problem.
    """
    if solver not in ("auto", "pcgs", "dense"):
        raise DomainError(f"solver must be auto, pcgs or dense, got {solver!r}")
    if solver == "pcgs" or not p.constant_coefficients:
        return "variable"
    return "constant"


def run_problem(p: ProblemSpec, g: Grid, solver: str = "auto", cfg: Optional[SolverConfig] = None) -> SolutionHistory:
    cfg = cfg or SolverConfig()
    method = "dense" if solver == "dense" else "pcgs"
    cfg = replace(cfg, method=method)
    if select_driver(p, solver) == "constant":
        return run_constant(p, g, cfg)
    return run_variable(p, g, cfg)
