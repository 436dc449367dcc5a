# equivix/tests/test_cli.py
"""End-to-end tests of the command-line interface."""

import csv
import json

import pytest

from equivix.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main
from equivix.config import DATA_DIR

SHEAR = str(DATA_DIR / "groups" / "shear.json")


def _write(path, payload) -> str:
    path.write_text(json.dumps(payload))
    return str(path)


def _verify_manifest(tmp_path) -> str:
    return _write(
        tmp_path / "verify.json",
        {
            "command": "verify",
            "symbol": "bott-dirac:1",
            "g": "rotation:0.7",
            "clifford_n_half": [1],
            "projection_samples": 50,
            "cocycle_tuples": 2,
            "basis": {"N": 30, "hbar": 0.5},
        },
    )


class TestIndexCommand:
    def test_fixed_point_report(self, capsys):
        assert main(["index", "--symbol", "bott-dirac:1", "--g", "rotation:0.7"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["method"] == "fixed-point"
        assert report["n_g"] == 0
        assert report["nearest_integer"] == 1
        assert report["value_re"] == pytest.approx(1.0, abs=1e-12)
        assert "HERMITE_N" in report["defaults"]

    def test_report_to_file(self, tmp_path):
        out = tmp_path / "nested" / "index.json"
        code = main(["index", "--symbol", "bott-dirac:1", "--g", "blockrot:1.2", "--out", str(out)])
        assert code == EXIT_OK
        assert json.loads(out.read_text())["g_description"] == "blockrot:1.2"

    def test_integral_with_refinement_table(self, tmp_path, capsys):
        table = tmp_path / "refinement.csv"
        code = main(["index", "--symbol", "oscillator", "--g", "identity", "--tol", "1e-2", "--table", str(table)])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["method"] == "integral"
        assert report["nearest_integer"] == 1
        lines = table.read_text().splitlines()
        assert lines[0].startswith("# defaults ")
        rows = list(csv.DictReader(lines[1:]))
        assert rows[0]["level"] == "0"
        assert rows[0]["difference"] == ""

    def test_fixed_point_method_with_fixed_plane(self):
        code = main(["index", "--symbol", "bott-dirac:1", "--g", "rotation:0", "--method", "fixed-point"])
        assert code == EXIT_USAGE

    def test_non_orthogonal_g(self):
        assert main(["index", "--symbol", "bott-dirac:1", "--g", SHEAR]) == EXIT_USAGE

    def test_missing_symbol_file(self, tmp_path):
        assert main(["index", "--symbol", str(tmp_path / "missing.json")]) == EXIT_USAGE

    def test_bad_symbol_name(self):
        assert main(["index", "--symbol", "bott-dirac:two"]) == EXIT_USAGE


class TestUsage:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_bad_option_value(self):
        assert main(["index", "--symbol", "oscillator", "--nodes", "3"]) == EXIT_USAGE

    def test_manifest_names_the_command(self, tmp_path):
        manifest = _write(
            tmp_path / "run.json",
            {"command": "index", "symbol": "bott-dirac:1", "g": "rotation:1.0", "out": "report.json"},
        )
        assert main(["--manifest", manifest]) == EXIT_OK
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["method"] == "fixed-point"

    def test_manifest_without_command(self, tmp_path):
        manifest = _write(tmp_path / "run.json", {"symbol": "bott-dirac:1"})
        assert main(["--manifest", manifest]) == EXIT_USAGE


@pytest.mark.slow
class TestVerifyCommand:
    def test_passes(self, tmp_path, capsys):
        assert main(["verify", "--manifest", _verify_manifest(tmp_path)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert all(check["status"] != "fail" for check in report["checks"])

    def test_flag_overrides_manifest(self, tmp_path):
        code = main(["verify", "--manifest", _verify_manifest(tmp_path), "--g", SHEAR])
        assert code == EXIT_CHECK_FAILED


class TestConvergeCommand:
    @pytest.mark.slow
    def test_bundled_trace_formula(self, tmp_path):
        out = tmp_path / "trace.csv"
        assert main(["converge", "--experiment", "trace-formula-rot90.json", "--out", str(out)]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# defaults ")
        assert lines[1].startswith("# experiment trace-formula-rot90 kind trace-formula")
        rows = list(csv.DictReader(lines[2:]))
        assert [row["N"] for row in rows] == ["10", "20", "30"]
        assert list(rows[0]) == ["hbar", "N", "lhs", "target", "abs_err", "rel_err", "seconds", "warning"]
        assert float(rows[-1]["abs_err"]) < 1e-5

    def test_invalid_experiment(self, tmp_path):
        experiment = _write(
            tmp_path / "empty.json",
            {"kind": "trace-formula", "n": 1, "functions": [{"terms": []}], "hbar": []},
        )
        assert main(["converge", "--experiment", experiment]) == EXIT_USAGE

    def test_missing_experiment(self):
        assert main(["converge"]) == EXIT_USAGE

    def test_group_file_next_to_experiment(self, tmp_path, monkeypatch):
        runs = tmp_path / "runs"
        runs.mkdir()
        _write(runs / "quarter.json", {"matrix": [[0.0, -1.0], [1.0, 0.0]]})
        gaussian = {"x_decay": 1.0, "xi_decay": 1.0}
        experiment = _write(
            runs / "trace.json",
            {
                "name": "local-group",
                "kind": "trace-formula",
                "n": 2,
                "g": "quarter.json",
                "functions": [{"terms": [{"coefficient": 1.0, "factors": [gaussian, gaussian]}]}],
                "hbar": [0.5],
                "cutoffs": [10],
            },
        )
        elsewhere = tmp_path / "elsewhere"
        elsewhere.mkdir()
        monkeypatch.chdir(elsewhere)
        out = tmp_path / "trace.csv"
        assert main(["converge", "--experiment", experiment, "--out", str(out)]) == EXIT_OK
        assert "local-group" in out.read_text()
