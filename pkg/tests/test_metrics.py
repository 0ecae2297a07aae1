import mpmath
import numpy as np
import pytest

from analysis.common.metrics import convergence_order, discrete_l2, error_report
from analysis.common.problems import example1
from tsfcde.errors import DomainError, ProblemSpecError
from tsfcde.scheme import Grid, SolutionHistory, read_solution_csv, run_problem, write_solution_csv


def bump(x, t):
    return (t**2.5 + 1.0) * x**2 * (1 - x) ** 2


def exact_history(g, exact):
    levels = np.stack([exact(g.x_interior, t) for t in g.t_levels])
    return SolutionHistory(g, levels, filled=g.M + 1)


def test_discrete_l2_examples():
    assert discrete_l2(np.array([3.0, 4.0]), 0.25) == pytest.approx(2.5)
    assert discrete_l2(np.zeros(7), 0.1) == 0.0
    with pytest.raises(DomainError):
        discrete_l2(np.ones(3), 0.0)


def test_discrete_l2_matches_extended_precision():
    h = 1.0 / 1000
    x = h * np.arange(1, 1000)
    v = np.sin(np.pi * x)
    with mpmath.workdps(40):
        oracle = mpmath.sqrt(mpmath.mpf(h) * mpmath.fsum(mpmath.mpf(float(vi)) ** 2 for vi in v))
    assert discrete_l2(v, h) == pytest.approx(float(oracle), rel=1e-14)
    # sum sin^2 over the interior nodes is exactly 500
    assert discrete_l2(v, h) == pytest.approx(np.sqrt(0.5), rel=1e-13)


def test_exact_levels_have_zero_error():
    g = Grid(N=16, M=4)
    rep = error_report(exact_history(g, bump), bump)
    assert rep.l2_max_over_time == pytest.approx(0.0, abs=1e-16)
    assert rep.max_norm == pytest.approx(0.0, abs=1e-16)
    assert rep.per_level.shape == (g.M + 1,)


def test_single_perturbation():
    g = Grid(N=16, M=4)
    hist = exact_history(g, bump)
    hist.levels[2, 5] += 1e-3
    rep = error_report(hist, bump)
    assert rep.max_norm == pytest.approx(1e-3, rel=1e-9)
    assert rep.l2_max_over_time == pytest.approx(np.sqrt(g.h) * 1e-3, rel=1e-9)
    assert np.argmax(rep.per_level) == 2


def test_max_norm_includes_boundary():
    g = Grid(N=8, M=2)

    def one(x, t):
        return np.ones_like(x)

    rep = error_report(exact_history(g, one), one)
    assert rep.l2_max_over_time == 0.0
    assert rep.max_norm == 1.0


def test_partial_history_uses_filled_levels():
    g = Grid(N=8, M=4)
    hist = exact_history(g, bump)
    hist.levels[3:] = np.nan
    hist.filled = 3
    rep = error_report(hist, bump)
    assert rep.per_level.shape == (3,)
    assert np.isfinite(rep.max_norm)


def test_missing_exact_solution():
    g = Grid(N=8, M=2)
    with pytest.raises(ProblemSpecError):
        error_report(exact_history(g, bump), None)


def test_convergence_order_examples():
    assert convergence_order(4e-4, 1e-4, 2.0) == pytest.approx(2.0)
    assert convergence_order(1e-3, 1e-3, 2.0) == 0.0
    assert convergence_order(2.4972e-4, 5.9441e-5, 2.0) == pytest.approx(np.log2(2.4972e-4 / 5.9441e-5))
    assert convergence_order(2.7e-2, 1e-3, 3.0) == pytest.approx(3.0)


@pytest.mark.parametrize("args", [(0.0, 1e-3, 2.0), (1e-3, -1.0, 2.0), (1e-3, 1e-4, 1.0)])
def test_convergence_order_domain(args):
    with pytest.raises(DomainError):
        convergence_order(*args)


def test_first_tabulated_order():
    assert convergence_order(2.7954e-4, 6.6775e-5, 2.0) == pytest.approx(2.0657, abs=5e-5)


def test_error_report_survives_csv_round_trip(tmp_path):
    p = example1(0.5, 1.8)
    g = Grid(N=16, M=8)
    hist = run_problem(p, g)
    back = read_solution_csv(write_solution_csv(hist, tmp_path / "hist.csv"), g)
    before, after = error_report(hist, p.exact), error_report(back, p.exact)
    assert after.l2_max_over_time == before.l2_max_over_time
    assert after.max_norm == before.max_norm
