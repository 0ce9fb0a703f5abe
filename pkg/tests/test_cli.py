import json

import numpy as np
import pytest

from gaussepi.cli import main, parse_grid
from gaussepi.exceptions import ValidationError
from gaussepi.state import GaussianState, two_mode_squeezed


def write_state(path, cov, partition=None):
    n = len(cov) // 2
    data = {"n_modes": n, "covariance": np.asarray(cov, dtype=float).ravel().tolist(), "displacement": [0.0] * (2 * n)}
    if partition:
        data["partition"] = [{"name": k, "n_modes": v} for k, v in partition]
    path.write_text(json.dumps(data))
    return str(path)


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


class TestCapacity:
    def test_reference_row(self, capsys):
        assert main(["capacity", "--lambda-grid", "0.25:0.25:1", "--N", "10", "--NE", "0.5"]) == 0
        out = capsys.readouterr().out
        header, rows = csv_rows(out)
        assert header == ["lambda", "N", "N_E", "C_E_exact", "epi_bound", "naive_bound"]
        assert out.splitlines()[-1] == "0.25,10,0.5,1.54007944944,2.33438383328,4.42542600981"
        assert float(rows[0]["epi_bound"]) == pytest.approx(2.3344, abs=1e-4)
        assert float(rows[0]["naive_bound"]) == pytest.approx(4.4254, abs=1e-4)
        assert "# units=nats" in out

    def test_bits(self, capsys):
        main(["capacity", "--lambda-grid", "1:1:1", "--N", "10", "--NE", "0.5", "--bits"])
        out = capsys.readouterr().out
        _, rows = csv_rows(out)
        assert float(rows[0]["C_E_exact"]) == pytest.approx(6.701994141683 / np.log(2), abs=1e-9)
        assert "# units=bits" in out

    def test_twelve_significant_digits(self, capsys):
        main(["capacity", "--lambda-grid", "0.25:0.25:1", "--N", "10", "--NE", "0.5"])
        _, rows = csv_rows(capsys.readouterr().out)
        digits = rows[0]["C_E_exact"].replace(".", "").lstrip("0")
        assert len(digits) == 12

    def test_n_grid_and_json(self, tmp_path):
        out = tmp_path / "cap.json"
        args = ["capacity", "--lambda", "0.5", "--N-grid", "0:4:5", "--NE", "2", "--format", "json", "--output", str(out)]
        assert main(args) == 0
        data = json.loads(out.read_text())
        assert [r["N"] for r in data["records"]] == [0.0, 1.0, 2.0, 3.0, 4.0]
        assert data["config"]["units"] == "nats"

    @pytest.mark.parametrize(
        "args",
        [
            ["--lambda-grid", "0:1", "--N", "1", "--NE", "1"],
            ["--lambda-grid", "0:2:3", "--N", "1", "--NE", "1"],
            ["--N", "1", "--NE", "1"],
            ["--lambda-grid", "0:1:3", "--NE", "1"],
        ],
    )
    def test_bad_input_exit_1(self, args):
        assert main(["capacity"] + args) == 1


class TestEpiCheck:
    def test_example_exits_zero(self, capsys):
        assert main(["epi-check", "--seed", "1", "--count", "10", "--modes", "1", "--env", "0"]) == 0
        header, rows = csv_rows(capsys.readouterr().out)
        assert header == ["seed", "m", "L", "lambda", "delta0", "min_delta_slope", "max_fisher_residual"]
        assert [int(r["seed"]) for r in rows] == list(range(1, 11))
        assert all(float(r["delta0"]) >= -1e-9 for r in rows)

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["epi-check", "--seed", "7", "--count", "5", "--modes", "2", "--env", "1", "--lambda", "0.25"]
        main(args + ["--output", str(a)])
        main(args + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_seed_offsets_are_order_independent(self, capsys):
        main(["epi-check", "--seed", "3", "--count", "4", "--modes", "1", "--env", "1"])
        _, rows_all = csv_rows(capsys.readouterr().out)
        main(["epi-check", "--seed", "5", "--count", "1", "--modes", "1", "--env", "1"])
        _, rows_one = csv_rows(capsys.readouterr().out)
        assert rows_all[2] == rows_one[0]

    def test_kind_and_json(self, capsys):
        assert main(["epi-check", "--seed", "1", "--count", "2", "--kind", "pure", "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["config"]["kind"] == "pure" and len(data["records"]) == 2

    def test_bad_count(self):
        assert main(["epi-check", "--seed", "1", "--count", "0"]) == 1

    def test_missing_seed(self):
        assert main(["epi-check", "--count", "3"]) == 1


class TestOtherSweeps:
    def test_debruijn(self, capsys):
        assert main(["debruijn-check", "--seed", "0", "--count", "5"]) == 0
        header, rows = csv_rows(capsys.readouterr().out)
        assert "richardson_ratio" in header
        assert all(3.5 <= float(r["richardson_ratio"]) <= 4.5 for r in rows)

    @pytest.mark.parametrize("lemma, lo, hi", [("2", 1.8, 2.2), ("3i", 3.5, 4.5), ("3ii", 3.5, 4.5)])
    def test_perturb(self, capsys, lemma, lo, hi):
        assert main(["perturb-check", "--lemma", lemma, "--seed", "2"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert lo <= rep["ratio_at_half_eps"] <= hi

    def test_perturb_precondition(self):
        assert main(["perturb-check", "--lemma", "3ii", "--seed", "2", "--eps", "10"]) == 1

    def test_perturb_3i_needs_env(self):
        assert main(["perturb-check", "--lemma", "3i", "--seed", "2", "--env", "0"]) == 1

    def test_oracle(self, capsys):
        assert main(["oracle"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert max(data["residuals"].values()) < data["tolerance"]


class TestStateCommands:
    def test_validate_rejects_sub_vacuum(self, tmp_path, capsys):
        path = write_state(tmp_path / "bad.json", np.diag([0.5, 0.5]))
        assert main(["validate", path]) == 1
        assert "uncertainty violation" in capsys.readouterr().err

    def test_validate_accepts_vacuum(self, tmp_path, capsys):
        path = write_state(tmp_path / "vac.json", np.eye(2))
        assert main(["validate", path]) == 0
        assert json.loads(capsys.readouterr().out)["ok"] is True

    def test_spectrum(self, tmp_path, capsys, squeezed_thermal_pair):
        path = write_state(tmp_path / "pair.json", squeezed_thermal_pair)
        assert main(["spectrum", path]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["symplectic_eigenvalues"] == pytest.approx([np.sqrt(3)] * 2)
        assert data["gap"] is None

    def test_spectrum_invalid_state(self, tmp_path):
        assert main(["spectrum", write_state(tmp_path / "bad.json", np.diag([0.5, 0.5]))]) == 1

    def test_entropy_conditional(self, tmp_path, capsys):
        path = tmp_path / "tms.json"
        path.write_text(two_mode_squeezed(3.0).to_json())
        assert main(["entropy", str(path), "--conditional", "A|B"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["conditional"]["value"] == pytest.approx(-2 * np.log(2), abs=1e-9)
        assert data["entropy"] == pytest.approx(0.0, abs=1e-9)

    def test_entropy_bits(self, tmp_path, capsys):
        path = tmp_path / "th.json"
        path.write_text(GaussianState(3.0 * np.eye(2)).to_json())
        main(["entropy", str(path), "--bits"])
        assert json.loads(capsys.readouterr().out)["entropy"] == pytest.approx(2.0, abs=1e-11)

    def test_entropy_unknown_subsystem(self, tmp_path):
        path = write_state(tmp_path / "s.json", np.eye(4), [("A", 1), ("B", 1)])
        assert main(["entropy", path, "--conditional", "A|C"]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 1

    def test_not_json(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{not json")
        assert main(["spectrum", str(p)]) == 1


def test_unknown_command():
    assert main(["bogus"]) == 1


def test_parse_grid():
    assert np.allclose(parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    with pytest.raises(ValidationError):
        parse_grid("0:1:x")
