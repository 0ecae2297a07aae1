import mpmath
import numpy as np
import pytest

from analysis.evaluators.benchmark import BENCH_COLUMNS
from analysis.evaluators.convergence import CONVERGENCE_COLUMNS
from tsfcde.main import main, parse_ladder
from tsfcde.toeplitz import Toeplitz, strang
from tsfcde.utils.csv_utils import read_frame, read_matrix_csv


def run(*argv, output):
    return main([*argv, "--output", str(output), "--log-level", "WARNING"])


def test_solve_writes_solution_and_residuals(tmp_path, capsys):
    assert run("solve", "--N", "32", "--M", "32", output=tmp_path) == 0
    frame = read_frame(tmp_path / "solution_example1.csv")
    assert list(frame.columns) == ["x", "u"]
    assert len(frame) == 33
    assert frame["u"].iloc[0] == 0.0 and frame["u"].iloc[-1] == 0.0
    residuals = read_frame(tmp_path / "residuals_example1.csv")
    assert list(residuals.columns) == ["iteration", "relative_residual"]
    assert residuals["relative_residual"].iloc[0] == 1.0
    out = capsys.readouterr().out
    assert "driver: constant (constant-gsf)" in out
    assert "l2_error:" in out


def test_solve_is_byte_stable(tmp_path):
    for name in ("first", "second"):
        assert run("solve", "--problem", "example2", "--N", "16", "--M", "8", output=tmp_path / name) == 0
    first = (tmp_path / "first" / "solution_example2.csv").read_bytes()
    assert first == (tmp_path / "second" / "solution_example2.csv").read_bytes()


def test_dense_and_pcgs_solutions_agree(tmp_path, capsys):
    args = ("solve", "--problem", "example2", "--N", "32", "--M", "16")
    assert run(*args, "--solver", "dense", output=tmp_path / "dense") == 0
    assert run(*args, "--solver", "pcgs", output=tmp_path / "pcgs") == 0
    assert "driver: variable (variable-dense)" in capsys.readouterr().out
    assert not (tmp_path / "dense" / "residuals_example2.csv").exists()
    dense = read_frame(tmp_path / "dense" / "solution_example2.csv")["u"].to_numpy()
    fast = read_frame(tmp_path / "pcgs" / "solution_example2.csv")["u"].to_numpy()
    np.testing.assert_allclose(fast, dense, atol=1e-9)


def test_full_history_and_custom_problem(tmp_path, capsys):
    assert run("solve", "--problem", "custom-constant", "--N", "10", "--M", "3", "--full-history", output=tmp_path) == 0
    frame = read_frame(tmp_path / "solution_custom-constant.csv")
    assert list(frame.columns) == ["x", "u_0", "u_1", "u_2", "u_3"]
    assert "l2_error" not in capsys.readouterr().out


def test_invalid_configuration_exits_nonzero(tmp_path):
    assert run("solve", "--alpha", "1.5", output=tmp_path) == 1
    assert run("solve", "--N", "4", output=tmp_path) == 1
    assert not (tmp_path / "solution_example1.csv").exists()


def test_unknown_solver_is_rejected_by_the_parser(tmp_path):
    with pytest.raises(SystemExit):
        run("solve", "--solver", "gmres", output=tmp_path)


def test_ladder_parsing():
    assert parse_ladder("32,64, 128") == [32, 64, 128]


def test_convergence_single_entry(tmp_path):
    assert run("convergence", "--ladder", "16", output=tmp_path) == 0
    path = tmp_path / "convergence_example1_space-time.csv"
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(CONVERGENCE_COLUMNS)
    table = read_frame(path)
    assert len(table) == 1
    assert table["l2_order"].isna().all()


def test_convergence_orders(tmp_path):
    assert run("convergence", "--ladder", "16,32", "--workers", "2", output=tmp_path) == 0
    table = read_frame(tmp_path / "convergence_example1_space-time.csv")
    assert list(table["h"]) == [1 / 16, 1 / 32]
    assert table["l2_error"].iloc[1] < table["l2_error"].iloc[0]
    assert 1.5 < table["l2_order"].iloc[1] < 2.5


def test_convergence_rejects_unsorted_ladder(tmp_path):
    assert run("convergence", "--ladder", "32,16", output=tmp_path) == 1


def test_weights_second_difference(tmp_path):
    assert run("weights", "--beta", "2.0", "--K", "4", output=tmp_path) == 0
    table = read_frame(tmp_path / "weights.csv")
    assert list(table.columns) == ["k", "g", "omega", "a", "b"]
    np.testing.assert_allclose(table["omega"], [1.0, -2.0, 1.0, 0.0, 0.0], atol=1e-15)


def test_weights_crank_nicolson_and_binomials(tmp_path):
    assert run("weights", "--alpha", "1.0", "--beta", "1.3", "--K", "3", output=tmp_path) == 0
    table = read_frame(tmp_path / "weights.csv")
    np.testing.assert_allclose(table["a"], [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    oracle = [float((-1) ** k * mpmath.binomial(1.3, k)) for k in range(4)]
    np.testing.assert_allclose(table["g"], oracle, rtol=1e-14)


def test_weights_needs_positive_k(tmp_path):
    assert run("weights", "--K", "0", output=tmp_path) == 1


def test_export_level_operators(tmp_path):
    assert run("export", "--N", "8", "--M", "4", "--level", "1", output=tmp_path) == 0
    A = read_matrix_csv(tmp_path / "A_level1.csv")
    PinvA = read_matrix_csv(tmp_path / "PinvA_level1.csv")
    assert A.shape == PinvA.shape == (7, 7)
    np.testing.assert_array_equal(A[1:, 1:], A[:-1, :-1])
    P = strang(Toeplitz(A[:, 0], A[0, :])).dense()
    np.testing.assert_allclose(PinvA, np.linalg.solve(P, A), atol=1e-10)


def test_export_level_out_of_range(tmp_path):
    assert run("export", "--N", "8", "--M", "4", "--level", "4", output=tmp_path) == 1


def test_bench_table(tmp_path):
    assert run("bench", "--ladder", "16", "--repeats", "1", output=tmp_path) == 0
    path = tmp_path / "bench_example1.csv"
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(BENCH_COLUMNS)
    table = read_frame(path)
    assert table["speedup"].iloc[0] == pytest.approx(table["time_dense_s"].iloc[0] / table["time_fast_s"].iloc[0])
