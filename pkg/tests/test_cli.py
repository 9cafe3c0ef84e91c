import json

import pytest
from typer.testing import CliRunner

from embednorm.main import app
from embednorm.utils_report import CSV_FIELDS, REPORT_FIELDS


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        # click >= 8.2 dropped mix_stderr; stderr is always kept separate there.
        return CliRunner()


def compute_json(runner, *args):
    result = runner.invoke(app, ["compute", *args])
    assert result.exit_code == 0, result.stderr
    return json.loads(result.stdout)


class TestCompute:
    def test_product_p1(self, runner):
        data = compute_json(runner, "--weights", "product", "--gammas", "1,1", "--p", "1", "--s", "2")
        assert data["exact"] == pytest.approx(4.0)
        assert data["lower_bound"] == pytest.approx(4.0)
        assert data["upper_bound"] == pytest.approx(4.0)

    def test_finite_diameter_p1(self, runner):
        data = compute_json(runner, "--weights", "fdw", "--omega", "1", "--q", "2", "--p", "1", "--s", "10")
        assert data["exact"] == pytest.approx(8.0)

    def test_explicit_file_pinf(self, runner, tmp_path):
        path = tmp_path / "weights.txt"
        path.write_text("empty 1\n1 1\n")
        data = compute_json(runner, "--weights", "explicit", "--file", str(path), "--p", "inf", "--s", "1")
        assert data["p"] == "inf"
        assert data["exact"] == pytest.approx(1.5)

    def test_json_keys(self, runner):
        data = compute_json(runner, "--weights", "product", "--gammas", "0.5,2", "--p", "2", "--s", "2")
        assert list(data) == list(REPORT_FIELDS)
        assert data["lower_bound_simple"] <= data["lower_bound"] * (1 + 1e-9)
        assert data["lower_bound"] <= data["upper_bound"] * (1 + 1e-9)

    def test_fraction_exponent(self, runner):
        data = compute_json(runner, "--weights", "product", "--gammas", "0.5,0.5", "--p", "3/2", "--s", "2")
        assert data["p"] == pytest.approx(1.5)
        assert data["exact"] is None

    def test_csv(self, runner):
        result = runner.invoke(
            app, ["compute", "--weights", "fow", "--omega", "1", "--q", "2", "--p", "2", "--s", "6", "--out", "csv"]
        )
        assert result.exit_code == 0, result.stderr
        header, row = result.stdout.strip().splitlines()
        assert header.split(",") == list(CSV_FIELDS)
        assert row.split(",")[0] == "6"

    def test_text(self, runner):
        result = runner.invoke(
            app, ["compute", "--weights", "product", "--gammas", "1,1,1", "--p", "2", "--s", "3", "--out", "text"]
        )
        assert result.exit_code == 0, result.stderr
        assert "lower_bound" in result.stdout
        assert "candidate" in result.stdout

    def test_deterministic(self, runner):
        args = ["compute", "--weights", "fdw", "--omega", "0.7", "--q", "1", "--p", "3", "--s", "6", "--seed", "3"]
        first = runner.invoke(app, args)
        second = runner.invoke(app, args)
        assert first.exit_code == 0, first.stderr
        assert first.stdout == second.stdout

    def test_missing_gammas(self, runner):
        result = runner.invoke(app, ["compute", "--weights", "product", "--s", "2"])
        assert result.exit_code == 2
        assert "--gammas" in result.stderr

    def test_p_below_one(self, runner):
        result = runner.invoke(app, ["compute", "--weights", "product", "--gammas", "1", "--p", "0.5", "--s", "1"])
        assert result.exit_code == 2

    def test_unknown_scheme(self, runner):
        result = runner.invoke(app, ["compute", "--weights", "banana", "--s", "2"])
        assert result.exit_code == 2


class TestScan:
    def test_finite_order_growth(self, runner):
        result = runner.invoke(
            app, ["scan", "--weights", "fow", "--omega", "1", "--q", "2", "--p", "2", "--s-range", "16:512"]
        )
        assert result.exit_code == 0, result.stderr
        lines = result.stdout.strip().splitlines()
        assert lines[0].split(",") == list(CSV_FIELDS)
        assert len(lines) == 1 + 6 + 1
        summary = lines[-1]
        assert summary.startswith("# growth: slope=")
        slope = float(summary.split("slope=")[1].split()[0])
        assert abs(slope - 1.0) < 0.1

    def test_needs_exactly_one_dimension_option(self, runner):
        base = ["scan", "--weights", "fow", "--omega", "1", "--q", "2"]
        assert runner.invoke(app, base).exit_code == 2
        assert runner.invoke(app, [*base, "--s", "4", "--s-range", "4:8"]).exit_code == 2

    def test_too_few_points(self, runner):
        result = runner.invoke(app, ["scan", "--weights", "fow", "--omega", "1", "--q", "2", "--s-range", "4:16"])
        assert result.exit_code == 0, result.stderr
        assert "too few points" in result.stdout

    def test_json(self, runner):
        result = runner.invoke(
            app, ["scan", "--weights", "fow", "--omega", "1", "--q", "1", "--p", "inf", "--s-range", "2:6:lin", "--out", "json"]
        )
        assert result.exit_code == 0, result.stderr
        data = json.loads(result.stdout)
        assert [r["s"] for r in data["reports"]] == [2, 3, 4, 5, 6]
        assert set(data["growth"]) == {"slope", "class", "offset"}
        for r in data["reports"]:
            assert r["p"] == "inf"
            assert r["lower_bound"] == pytest.approx(r["exact"])

    def test_bad_range(self, runner):
        result = runner.invoke(app, ["scan", "--weights", "fow", "--omega", "1", "--q", "2", "--s-range", "8:4"])
        assert result.exit_code == 2


class TestVerify:
    def test_cap(self, runner):
        assert runner.invoke(app, ["verify", "--max-s", "40"]).exit_code == 3

    def test_single_suite(self, runner):
        result = runner.invoke(app, ["verify", "--suite", "eqell", "--max-s", "14"])
        assert result.exit_code == 0, result.stderr
        assert "PASS eqell" in result.stdout

    def test_unknown_suite(self, runner):
        assert runner.invoke(app, ["verify", "--suite", "nonsense"]).exit_code == 2

    def test_all_suites(self, runner):
        result = runner.invoke(app, ["verify", "--max-s", "10", "--seed", "0"])
        assert result.exit_code == 0, result.stdout + result.stderr
        for name in ("endpoint", "kronecker", "eqell", "witness"):
            assert f"PASS {name}" in result.stdout


def test_bad_log_level(runner):
    result = runner.invoke(app, ["--log-level", "LOUD", "verify", "--suite", "eqell", "--max-s", "3"])
    assert result.exit_code == 2
