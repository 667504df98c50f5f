# 命令行测试: 各子命令的输出与退出码, 配置文件, 输出文件

import csv
import io
import json

import pytest

from engine.config import settings
from engine.main import main
from shared.constants import BENCHMARK_COLUMNS, EXIT_CODES

CASE_FIVE = ["--rate", "0.05", "--sigma", "0.5", "--spot", "2", "--strike", "2", "--maturity", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestPrice:
    def test_json_output(self, capsys):
        code, out = run(capsys, "price", *CASE_FIVE, "--format", "json")
        assert code == EXIT_CODES["SUCCESS"]
        record = json.loads(out)
        assert record["price"] == pytest.approx(0.2464156905, abs=1e-6)
        assert record["path"] == "laplace_inversion"
        assert record["nu"] == pytest.approx(-0.6)
        assert record["price_mc"] is None

    def test_text_output_has_all_columns(self, capsys):
        code, out = run(capsys, "price", *CASE_FIVE)
        assert code == 0
        keys = [line.split(":")[0].strip() for line in out.splitlines()]
        assert keys[:4] == ["price", "normalized_price", "path", "error_indicator"]

    def test_zero_strike_uses_closed_form(self, capsys):
        argv = ["--rate", "0.05", "--sigma", "0.5", "--spot", "2", "--strike", "0", "--maturity", "1"]
        code, out = run(capsys, "price", *argv, "--format", "json")
        assert code == 0
        assert json.loads(out)["path"] == "closed_form_nonpositive_q"

    def test_with_monte_carlo(self, capsys):
        code, out = run(
            capsys, "price", *CASE_FIVE, "--with-mc", "--paths", "2000", "--steps", "200", "--format", "json"
        )
        assert code == 0
        record = json.loads(out)
        assert record["mc_stderr"] > 0
        assert abs(record["price_mc"] - record["price"]) <= 5 * record["mc_stderr"] + 2e-3

    def test_malformed_flag(self, capsys):
        code, out = run(capsys, "price", "--rate", "abc")
        assert code == EXIT_CODES["VALIDATION_ERROR"]
        assert out == ""

    def test_missing_market_fields(self, capsys):
        code, out = run(capsys, "price", "--rate", "0.05")
        assert code == EXIT_CODES["VALIDATION_ERROR"]
        assert out == ""

    def test_invalid_market(self, capsys):
        code, _ = run(capsys, "price", *CASE_FIVE, "--t", "1.5")
        assert code == EXIT_CODES["VALIDATION_ERROR"]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "price.json"
        code, out = run(capsys, "price", *CASE_FIVE, "--format", "json", "--output", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text(encoding="utf-8"))["price"] == pytest.approx(0.2464156905, abs=1e-6)

    @pytest.mark.parametrize("target", ["missing/price.json", "."])
    def test_unwritable_output_file(self, capsys, tmp_path, target):
        code, out = run(capsys, "price", *CASE_FIVE, "--format", "json", "--output", str(tmp_path / target))
        assert code == EXIT_CODES["VALIDATION_ERROR"]
        assert out == ""

    def test_default_format_from_settings(self, capsys, monkeypatch):
        monkeypatch.setattr(settings, "OUTPUT_FORMAT", "json")
        code, out = run(capsys, "price", *CASE_FIVE)
        assert code == 0
        assert "price" in json.loads(out)


class TestConfigFile:
    def test_values_from_file(self, capsys, tmp_path):
        path = tmp_path / "case5.json"
        path.write_text(json.dumps({"rate": 0.05, "sigma": 0.5, "spot": 2, "strike": 2, "maturity": 1}))
        code, out = run(capsys, "price", "--config", str(path), "--format", "json")
        assert code == 0
        assert json.loads(out)["price"] == pytest.approx(0.2464156905, abs=1e-6)

    def test_flags_override_file(self, capsys, tmp_path):
        path = tmp_path / "case5.json"
        path.write_text(json.dumps({"rate": 0.05, "sigma": 0.5, "spot": 2, "strike": 2, "maturity": 1}))
        code, out = run(capsys, "price", "--config", str(path), "--spot", "2.1", "--format", "json")
        assert code == 0
        assert json.loads(out)["price"] == pytest.approx(0.3062203648, abs=1e-6)

    def test_unknown_key(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"rate": 0.05, "volatility": 0.5}))
        code, out = run(capsys, "price", "--config", str(path))
        assert code == EXIT_CODES["VALIDATION_ERROR"]
        assert out == ""

    def test_unreadable_file(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _ = run(capsys, "price", "--config", str(path))
        assert code == EXIT_CODES["VALIDATION_ERROR"]


class TestBenchmark:
    def test_single_case_csv(self, capsys):
        code, out = run(capsys, "benchmark", "--case", "2", "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == BENCHMARK_COLUMNS
        assert len(rows) == 2
        row = dict(zip(rows[0], rows[1]))
        assert float(row["price_transform"]) == pytest.approx(0.2183875466, abs=1e-6)
        assert row["price_mc"] == ""

    def test_output_is_reproducible(self, capsys):
        _, first = run(capsys, "benchmark", "--case", "2", "--format", "csv")
        _, second = run(capsys, "benchmark", "--case", "2", "--format", "csv")
        assert first == second

    def test_full_table_json(self, capsys):
        code, out = run(capsys, "benchmark", "--format", "json")
        assert code == 0
        document = json.loads(out)
        assert [row["case"] for row in document["rows"]] == list(range(1, 8))
        assert document["max_abs_dev_vs_paper"] <= 2e-3

    def test_case_out_of_range(self, capsys):
        code, _ = run(capsys, "benchmark", "--case", "9")
        assert code == EXIT_CODES["VALIDATION_ERROR"]


class TestTransform:
    def test_json_output(self, capsys):
        code, out = run(capsys, "transform", "--a", "0.0625", "--nu=-0.6", "--z", "4.5", "--quadrature", "--format", "json")
        assert code == 0
        record = json.loads(out)
        assert record["identity_abscissa"] == 4.0
        assert record["finiteness_abscissa"] == pytest.approx(0.8)
        closed, quadrature = record["D_closed"], record["D_quadrature"]
        assert closed["re"] == pytest.approx(quadrature["re"], rel=1e-8)
        assert abs(record["F"]["im"]) <= 1e-12 * abs(record["F"]["re"])

    def test_complex_arguments(self, capsys):
        code, out = run(capsys, "transform", "--a", "1", "--nu", "0.5+0.9i", "--z=8-5j", "--format", "json")
        assert code == 0
        assert json.loads(out)["z"] == {"re": 8.0, "im": -5.0}

    def test_domain_violation(self, capsys):
        code, out = run(capsys, "transform", "--a", "0.0625", "--nu=-0.6", "--z", "3")
        assert code == EXIT_CODES["VALIDATION_ERROR"]
        assert out == ""


class TestInvertTest:
    def test_passes(self, capsys):
        code, out = run(capsys, "invert-test", "--pair", "exp", "--param", "0.5", "--t-eval", "1", "--format", "json")
        assert code == 0
        record = json.loads(out)
        assert record["passed"] is True
        assert record["relative_error"] <= 1e-7

    def test_unreachable_tolerance(self, capsys):
        code, _ = run(capsys, "invert-test", "--pair", "ramp", "--t-eval", "2", "--tol", "1e-300")
        assert code == EXIT_CODES["NUMERICAL_FAILURE"]


class TestSelfcheck:
    def test_sqrt_lemma(self, capsys):
        code, out = run(capsys, "selfcheck", "--suite", "sqrt-lemma", "--samples", "2000", "--format", "json")
        assert code == 0
        document = json.loads(out)
        assert document["passed"] is True
        assert document["suite"] == "sqrt-lemma"

    def test_failure_exit_code(self, capsys):
        code, out = run(capsys, "selfcheck", "--suite", "kernel", "--tolerance", "1e-300", "--format", "csv")
        assert code == EXIT_CODES["SELFCHECK_FAILED"]
        assert "false" in out

    def test_unknown_suite(self, capsys):
        code, _ = run(capsys, "selfcheck", "--suite", "everything")
        assert code == EXIT_CODES["VALIDATION_ERROR"]

    @pytest.mark.slow
    def test_full_suite(self, capsys):
        code, out = run(capsys, "selfcheck", "--format", "json")
        assert code == 0
        assert json.loads(out)["passed"] is True


def test_version(capsys):
    code, out = run(capsys, "--version")
    assert code == 0
    assert settings.APP_VERSION in out
