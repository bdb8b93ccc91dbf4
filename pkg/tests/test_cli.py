import json
import subprocess
import sys

import numpy as np
import pytest

from fodesolve.cli import main
from fodesolve.problemfile import format_problem

BENCHMARK = "problems/bagley_torvik.fode"
CUBIC = "problems/bagley_torvik_cubic.fode"


@pytest.fixture
def plate_file(tmp_path, plate):
    path = tmp_path / "plate.fode"
    path.write_text(format_problem(plate))
    return str(path)


@pytest.fixture
def plate_cubic_file(tmp_path, plate_cubic):
    path = tmp_path / "plate_cubic.fode"
    path.write_text(format_problem(plate_cubic))
    return str(path)


@pytest.fixture
def blowup_file(tmp_path):
    path = tmp_path / "blowup.fode"
    path.write_text(
        "term 1 0.5\nnonlinear 0 -1\nnonlinear 3 -10\ninit 0 0\n")
    return str(path)


def read_csv(path):
    lines = open(path).read().splitlines()
    header = lines[0].split(",")
    body = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return header, body


class TestSolve:
    def test_basic_run(self, plate_file, tmp_path):
        out = str(tmp_path / "out.csv")
        rc = main(["solve", "--problem", plate_file, "--step", "0.01",
                   "--t-end", "2", "--out", out])
        assert rc == 0
        header, body = read_csv(out)
        assert header == ["t", "y"]
        assert body.shape == (201, 2)
        assert body[0, 0] == 0.0 and body[0, 1] == 0.0
        assert body[-1, 0] == 2.0

    def test_full_span_row_count(self, plate_file, tmp_path):
        out = str(tmp_path / "out.csv")
        rc = main(["solve", "--problem", plate_file, "--step", "0.01",
                   "--t-end", "30", "--out", out])
        assert rc == 0
        _, body = read_csv(out)
        assert body.shape[0] == 3001

    def test_derivative_columns(self, plate_file, tmp_path):
        out = str(tmp_path / "out.csv")
        rc = main(["solve", "--problem", plate_file, "--step", "0.01",
                   "--t-end", "2", "--derivatives", "--out", out])
        assert rc == 0
        header, body = read_csv(out)
        assert header == ["t", "y", "z1", "dy1"]
        assert body[0, 2] == 0.0  # z1 starts at zero exactly

    def test_csv_bytes_are_reproducible(self, plate_file, tmp_path):
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        args = ["solve", "--problem", plate_file, "--step", "0.01",
                "--t-end", "2"]
        assert main(args + ["--out", a]) == 0
        assert main(args + ["--out", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_values_round_trip_through_text(self, plate_file, tmp_path):
        out = str(tmp_path / "out.csv")
        main(["solve", "--problem", plate_file, "--step", "0.01",
              "--t-end", "2", "--out", out])
        for line in open(out).read().splitlines()[1:]:
            for field in line.split(","):
                v = float(field)
                assert format(v, ".17g") == field

    def test_step_sensitivity_of_nonlinear_problem(self, plate_cubic_file,
                                                   tmp_path):
        coarse = str(tmp_path / "coarse.csv")
        fine = str(tmp_path / "fine.csv")
        rc_a = main(["solve", "--problem", plate_cubic_file, "--step", "0.1",
                     "--t-end", "30", "--out", coarse])
        rc_b = main(["solve", "--problem", plate_cubic_file,
                     "--step", "0.001", "--t-end", "30", "--out", fine])
        assert rc_a == 0 and rc_b == 0
        _, a = read_csv(coarse)
        _, b = read_csv(fine)
        common = b[::100, 1][: a.shape[0]]
        assert np.max(np.abs(a[:, 1] - common)) > 0.01

    def test_babenko_inversion_flag(self, plate_file, tmp_path):
        out = str(tmp_path / "out.csv")
        rc = main(["solve", "--problem", plate_file, "--step", "0.01",
                   "--t-end", "2", "--inversion", "babenko",
                   "--babenko-terms", "30", "--out", out])
        assert rc == 0

    def test_numerical_failure_writes_partial_csv(self, blowup_file,
                                                  tmp_path, capsys):
        out = str(tmp_path / "out.csv")
        with pytest.warns(RuntimeWarning):
            rc = main(["solve", "--problem", blowup_file, "--step", "0.1",
                       "--t-end", "50", "--out", out])
        assert rc == 3
        _, body = read_csv(out)
        assert 0 < body.shape[0] < 501
        assert np.all(np.isfinite(body))
        assert "numerical failure" in capsys.readouterr().err


class TestUsageErrors:
    def test_no_subcommand(self, capsys):
        assert main([]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 1

    def test_negative_step(self, plate_file):
        assert main(["solve", "--problem", plate_file, "--step", "-1",
                     "--t-end", "1"]) == 1

    def test_missing_required_flag(self):
        assert main(["solve", "--step", "0.01", "--t-end", "1"]) == 1

    def test_unparseable_flag_value(self, plate_file):
        assert main(["solve", "--problem", plate_file, "--step", "x",
                     "--t-end", "1"]) == 1

    def test_bad_babenko_terms(self, plate_file):
        assert main(["solve", "--problem", plate_file, "--step", "0.01",
                     "--t-end", "1", "--inversion", "babenko",
                     "--babenko-terms", "0"]) == 1


class TestInputErrors:
    def test_missing_problem_file(self, capsys):
        assert main(["solve", "--problem", "/no/such/file.fode",
                     "--step", "0.01", "--t-end", "1"]) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_malformed_problem_file(self, tmp_path, capsys):
        path = tmp_path / "bad.fode"
        path.write_text("term one 0.5\ninit 0 0\n")
        assert main(["solve", "--problem", str(path), "--step", "0.01",
                     "--t-end", "1"]) == 2
        err = capsys.readouterr().err
        assert "line 1" in err


class TestConvergence:
    def test_self_oracle_csv(self, plate_file, tmp_path):
        out = str(tmp_path / "conv.csv")
        rc = main(["convergence", "--problem", plate_file,
                   "--steps", "0.04,0.02,0.01", "--t-end", "2",
                   "--out", out])
        assert rc == 0
        lines = open(out).read().splitlines()
        assert lines[0] == "h,sup_error,observed_order"
        first = lines[1].split(",")
        assert first[2] == ""  # coarsest row has no order yet
        assert len(lines) == 3  # finest step is the reference

    def test_gl_oracle_rows_decrease(self, plate_file, tmp_path):
        out = str(tmp_path / "conv.csv")
        rc = main(["convergence", "--problem", plate_file,
                   "--steps", "0.04,0.02,0.01", "--t-end", "2",
                   "--oracle", "gl", "--out", out])
        assert rc == 0
        _, body = read_csv_allow_blanks(out)
        errs = body[:, 1]
        assert np.all(np.diff(errs) < 0)

    def test_single_step_is_usage_error(self, plate_file):
        assert main(["convergence", "--problem", plate_file,
                     "--steps", "0.01", "--t-end", "2"]) == 1

    def test_gl_on_nonlinear_problem(self, plate_cubic_file):
        assert main(["convergence", "--problem", plate_cubic_file,
                     "--steps", "0.02,0.01", "--t-end", "2",
                     "--oracle", "gl"]) == 2


def read_csv_allow_blanks(path):
    lines = open(path).read().splitlines()
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        rows.append([float(x) if x else np.nan for x in ln.split(",")])
    return header, np.array(rows)


class TestApply:
    @pytest.fixture
    def ramp_csv(self, tmp_path):
        path = tmp_path / "ramp.csv"
        h, n = 1e-3, 1001
        lines = ["t,value"]
        for i in range(n):
            t = i * h
            lines.append(f"{format(t, '.17g')},{format(t, '.17g')}")
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_half_integral_of_ramp(self, ramp_csv, tmp_path):
        out = str(tmp_path / "out.csv")
        rc = main(["apply", "--in", ramp_csv, "--order", "-0.5",
                   "--out", out])
        assert rc == 0
        _, body = read_csv(out)
        assert body[-1, 1] == pytest.approx(0.7522527780636751, rel=1e-3)

    def test_headerless_input_accepted(self, tmp_path):
        src = tmp_path / "plain.csv"
        src.write_text("0,0\n0.5,1\n1,2\n")
        rc = main(["apply", "--in", str(src), "--order", "-1",
                   "--out", str(tmp_path / "out.csv")])
        assert rc == 0

    def test_singular_origin_marked_not_fatal(self, tmp_path):
        src = tmp_path / "nz.csv"
        src.write_text("t,value\n0,1\n0.1,1.1\n0.2,1.2\n")
        out = str(tmp_path / "out.csv")
        rc = main(["apply", "--in", src.as_posix(), "--order", "0.5",
                   "--out", out])
        assert rc == 0
        _, body = read_csv(out)
        assert np.isnan(body[0, 1]) and np.all(np.isfinite(body[1:, 1]))

    def test_binomial_route_needs_zero_origin(self, tmp_path):
        src = tmp_path / "nz.csv"
        src.write_text("t,value\n0,1\n0.1,1.1\n0.2,1.2\n")
        assert main(["apply", "--in", str(src), "--order", "1.5",
                     "--out", str(tmp_path / "out.csv")]) == 2

    def test_non_uniform_grid_rejected(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text("t,value\n0,0\n0.1,1\n0.3,2\n")
        assert main(["apply", "--in", str(src), "--order", "-0.5",
                     "--out", str(tmp_path / "out.csv")]) == 2

    def test_grid_must_start_at_zero(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text("t,value\n1,0\n1.1,1\n1.2,2\n")
        assert main(["apply", "--in", str(src), "--order", "-0.5",
                     "--out", str(tmp_path / "out.csv")]) == 2

    def test_order_beyond_cap_is_usage_error(self, ramp_csv):
        assert main(["apply", "--in", ramp_csv, "--order", "20"]) == 1

    def test_output_round_trips_byte_for_byte(self, ramp_csv, tmp_path):
        first = str(tmp_path / "first.csv")
        second = str(tmp_path / "second.csv")
        main(["apply", "--in", ramp_csv, "--order", "-0.5", "--out", first])
        # identity pass over the produced file re-emits the same bytes
        main(["apply", "--in", first, "--order", "0", "--out", second])
        assert open(first, "rb").read() == open(second, "rb").read()


class TestVerify:
    def test_exit_zero_and_report(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out

    def test_json_report(self, capsys):
        assert main(["verify", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True
        assert all(c["passed"] for c in payload["checks"])
        assert len(payload["checks"]) >= 10


def test_installed_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fodesolve", "verify", "--json"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
