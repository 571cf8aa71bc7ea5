import json
import subprocess
import sys

import numpy as np
import pytest

from kspec.cli import main
from kspec.io import read_matrix, write_matrix

SIGN = np.diag([1.0, -1.0])


@pytest.fixture
def files(tmp_path):
    def make(name, M, role):
        path = tmp_path / f"{name}.json"
        write_matrix(path, M, role)
        return str(path)

    return make


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    report = json.loads(cap.out) if code == 0 and cap.out else None
    return code, report, cap.err


class TestAnalyze:
    def test_diagonal(self, files, capsys):
        code, rep, _ = run(["analyze", files("N", np.diag([1j, 2j]), "operator"),
                            files("G", SIGN, "gram")], capsys)
        assert code == 0
        assert rep["normality"]["normal"]
        labels = {tuple(p["eigenvalue"]): p["label"] for p in rep["spectrum"]}
        assert labels == {(0.0, 1.0): "PositiveType", (0.0, 2.0): "NegativeType"}
        assert rep["stability"]["stable"]
        assert rep["stability"]["J"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
        assert rep["axioms"]["passed"]
        assert rep["tolerances"]["cluster_rtol"] == 1e-8
        assert rep["version"] == "0.1.0"

    def test_hilbert_hermitian(self, files, capsys):
        N = np.array([[2.0, 1.0], [1.0, 3.0]])
        code, rep, _ = run(["analyze", files("N", N, "operator"), files("G", np.eye(2), "gram")],
                           capsys)
        assert code == 0
        assert all(p["label"] == "PositiveType" for p in rep["spectrum"])
        assert rep["stability"]["stable"]
        assert rep["stability"]["J"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]

    def test_singular_gram(self, files, capsys):
        code, _, err = run(["analyze", files("N", np.eye(2), "operator"),
                            files("G", np.diag([1.0, 0.0]), "gram")], capsys)
        assert code == 1
        assert "gram not invertible" in err

    def test_not_normal_reported(self, files, capsys):
        code, rep, _ = run(["analyze", files("N", [[0, 1], [0, 0]], "operator"),
                            files("G", np.eye(2), "gram")], capsys)
        assert code == 0
        assert rep["normality"]["normal"] is False
        assert rep["stability"]["violated"] == "not normal"

    def test_dimension_mismatch(self, files, capsys):
        code, _, err = run(["analyze", files("N", np.eye(3), "operator"), files("G", SIGN, "gram")],
                           capsys)
        assert code == 1 and "dimension mismatch" in err

    def test_bad_file(self, tmp_path, files, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        code, _, err = run(["analyze", str(bad), files("G", SIGN, "gram")], capsys)
        assert code == 1 and "unparseable matrix file" in err

    def test_deterministic(self, files, tmp_path, capsys):
        args = ["analyze", files("N", np.diag([1j, 2j]), "operator"), files("G", SIGN, "gram")]
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert main(args + ["--report", str(r1)]) == 0
        assert main(args + ["--report", str(r2)]) == 0
        assert r1.read_bytes() == r2.read_bytes()

    def test_seed_env_override(self, files, capsys, monkeypatch):
        monkeypatch.setenv("KSPEC_SEED", "7")
        code, rep, _ = run(["analyze", files("N", np.diag([1j, 2j]), "operator"),
                            files("G", SIGN, "gram"), "--seed", "3"], capsys)
        assert code == 0 and rep["seed"] == 7

    def test_tolerance_flags(self, files, capsys):
        code, rep, _ = run(["analyze", files("N", np.diag([1j, 2j]), "operator"),
                            files("G", SIGN, "gram"), "--tol-cluster", "1e-6",
                            "--tol-rank", "1e-10", "--tol-residual", "1e-8"], capsys)
        assert code == 0
        assert rep["tolerances"]["cluster_rtol"] == 1e-6
        assert rep["tolerances"]["residual_rtol"] == 1e-8

    def test_invalid_tolerance(self, files, capsys):
        code, _, _ = run(["analyze", files("N", np.eye(2), "operator"), files("G", SIGN, "gram"),
                          "--tol-cluster", "2"], capsys)
        assert code == 1


class TestSpectralFunction:
    def test_emits_projection(self, files, tmp_path, capsys):
        out = tmp_path / "E.json"
        code, rep, _ = run(["spectral-function", files("N", np.diag([1j, 2j]), "operator"),
                            files("G", SIGN, "gram"), "--rect", "-0.5", "0.5", "0.5", "1.5",
                            "--out", str(out)], capsys)
        assert code == 0
        assert rep["rank"] == 1 and rep["axioms"]["passed"]
        assert rep["quadrature_difference"] < 1e-10
        assert np.allclose(read_matrix(out), np.diag([1, 0]))

    def test_empty_rectangle(self, files, tmp_path, capsys):
        out = tmp_path / "E.json"
        code, rep, _ = run(["spectral-function", files("N", np.diag([1j, 2j]), "operator"),
                            files("G", SIGN, "gram"), "--rect", "5", "6", "5", "6",
                            "--out", str(out)], capsys)
        assert code == 0 and rep["rank"] == 0
        assert np.array_equal(read_matrix(out), np.zeros((2, 2)))

    def test_mixed_type(self, files, capsys):
        code, _, err = run(["spectral-function", files("N", np.diag([1j, 2j]), "operator"),
                            files("G", SIGN, "gram"), "--rect", "-1", "1", "0.5", "2.5"], capsys)
        assert code == 1
        assert "region not of positive type" in err
        assert "PositiveType" in err and "NegativeType" in err


class TestPencilRoot:
    def test_both_agree(self, files, tmp_path, capsys):
        code, rep, _ = run(["pencil-root", files("A", [[3.0]], "coefficient"),
                            files("C", [[1.0]], "coefficient"), "--method", "both",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        Za = read_matrix(tmp_path / "Z1_angular.json")
        Zh = read_matrix(tmp_path / "Z1_hyperbolic.json")
        assert abs(Za - Zh).max() <= 1e-12
        assert Za[0, 0] == pytest.approx((-3 + np.sqrt(5)) / 2, abs=1e-14)
        assert rep["roots"]["angular"]["passed"]

    def test_harmonic_rejected(self, files, capsys):
        code, _, err = run(["pencil-root", files("A", [[0.0]], "coefficient"),
                            files("C", [[1.0]], "coefficient"), "--method", "angular"], capsys)
        assert code == 1 and "strong stability fails" in err

    def test_double_root(self, files, tmp_path, capsys):
        code, _, _ = run(["pencil-root", files("A", 2 * np.eye(2), "coefficient"),
                          files("C", np.eye(2), "coefficient"), "--method", "hyperbolic",
                          "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        assert np.allclose(read_matrix(tmp_path / "Z1_hyperbolic.json"), -np.eye(2))


class TestResolventOrder:
    def test_jordan(self, files, capsys):
        code, rep, _ = run(["resolvent-order", files("T", [[0, 1], [0, 0]], "operator")], capsys)
        assert code == 0 and rep["order"] == 2 and rep["empirical_order"] == 2

    def test_diagonal(self, files, capsys):
        code, rep, _ = run(["resolvent-order", files("T", np.diag([1.0, 2.0]), "operator")], capsys)
        assert code == 0 and rep["order"] == 1

    def test_nonreal(self, files, capsys):
        code, _, err = run(["resolvent-order", files("T", np.diag([1j, 2.0]), "operator")], capsys)
        assert code == 1 and "nonreal spectrum" in err


class TestSylvester:
    def test_solve(self, files, tmp_path, capsys):
        out = tmp_path / "X.json"
        code, rep, _ = run(["sylvester", files("S", [[1.0]], "operator"),
                            files("T", [[-1.0]], "operator"), files("Z", [[2.0]], None),
                            "--out", str(out)], capsys)
        assert code == 0 and rep["residual"] < 1e-14
        assert read_matrix(out)[0, 0] == pytest.approx(1.0)

    def test_overlap(self, files, capsys):
        code, _, err = run(["sylvester", files("S", [[1.0]], "operator"),
                            files("T", [[1.0]], "operator"), files("Z", [[2.0]], None)], capsys)
        assert code == 1 and "spectra overlap" in err


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "kspec", "resolvent-order", files("T", [[0, 1], [0, 0]], "operator")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["order"] == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "0.1.0" in capsys.readouterr().out
