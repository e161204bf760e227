import json

import numpy as np
import pytest

from qndsim import NumericalIntegrityError
from qndsim import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestQndCheck:
    def test_effective_satisfies_strong_condition(self, capsys):
        code, payload = run_json(capsys, "qnd-check", "--hamiltonian", "effective", "--g", "1.0")
        assert code == 0
        assert payload["strong_condition"] is True
        assert payload["commutator_norm"] == 0.0
        assert payload["epsilon_ba"] <= 1e-10
        assert payload["delta_n_ba"] <= 1e-10

    def test_decoupled_gauge_analog_satisfies_strong_condition(self, capsys):
        code, payload = run_json(
            capsys, "qnd-check", "--hamiltonian", "gauge-analog", "--g", "0"
        )
        assert code == 0
        assert payload["strong_condition"] is True

    def test_coupled_gauge_analog_violates(self, capsys):
        code, payload = run_json(
            capsys, "qnd-check", "--hamiltonian", "gauge-analog", "--g", "0.5", "--delta", "5"
        )
        assert code == 0
        assert payload["strong_condition"] is False
        assert payload["commutator_norm"] > 0.0
        assert payload["epsilon_ba"] > 0.0

    def test_invalid_hamiltonian_exits_2(self, capsys):
        code = cli.main(["qnd-check", "--hamiltonian", "dipole"])
        capsys.readouterr()
        assert code == 2

    def test_missing_hamiltonian_exits_2(self, capsys):
        code = cli.main(["qnd-check"])
        capsys.readouterr()
        assert code == 2

    def test_fock_state_flag(self, capsys):
        code, payload = run_json(
            capsys,
            "qnd-check", "--hamiltonian", "gauge-analog", "--g", "0.1",
            "--delta", "10", "--system-state", "fock:1",
        )
        assert code == 0
        assert payload["epsilon_ba"] > 0.0


class TestSimulate:
    def test_json_fields_and_determinism(self, capsys):
        argv = ["simulate", "--model", "effective", "--branch", "fast", "--g", "0.5",
                "--cutoff", "1", "--state", "fock:1", "--electrons", "2000",
                "--trials", "50", "--seed", "7"]
        code, first = run(capsys, *argv)
        assert code == 0
        code, second = run(capsys, *argv)
        assert first == second
        payload = json.loads(first)
        assert payload["delta_n_ba"] == 0.0
        assert abs(payload["estimate_mean"] - 1.0) < 0.2
        assert len(payload["counts"]) == 50

    def test_zero_coupling_reports_divergence(self, capsys):
        code, payload = run_json(
            capsys,
            "simulate", "--model", "effective", "--g", "0", "--cutoff", "1",
            "--state", "fock:1", "--electrons", "100", "--trials", "5",
        )
        assert code == 0
        assert payload["delta_n_err"] == "diverges"
        assert payload["estimate_mean"] is None

    def test_validation_error_exits_2(self, capsys):
        code = cli.main(["simulate", "--electrons", "0"])
        capsys.readouterr()
        assert code == 2


class TestSweep:
    BASE = ["sweep", "--model", "effective", "--branch", "fast", "--g", "0.4",
            "--cutoff", "1", "--state", "fock:1", "--electrons", "1000",
            "--trials", "20", "--seed", "3"]

    def test_single_value_gives_one_row(self, capsys):
        code, out = run(capsys, *self.BASE, "--param", "delta", "--values", "10")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,value,delta_n_err,delta_n_ba,epsilon_ba"
        assert len(lines) == 2
        assert lines[1].startswith("delta,10,")

    def test_effective_delta_sweep_has_no_backaction(self, capsys):
        code, out = run(capsys, *self.BASE, "--param", "delta", "--values", "5,10,20")
        assert code == 0
        for line in out.strip().split("\n")[1:]:
            assert float(line.split(",")[3]) <= 1e-10

    def test_missing_values_exits_2(self, capsys):
        code = cli.main(self.BASE + ["--param", "delta"])
        capsys.readouterr()
        assert code == 2

    def test_json_format(self, capsys):
        code, out = run(capsys, *self.BASE, "--param", "g", "--values", "0.2,0.4",
                        "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert [r["value"] for r in rows] == [0.2, 0.4]

    def test_output_file_byte_identical(self, capsys, tmp_path):
        target = tmp_path / "table.csv"
        args = self.BASE + ["--param", "delta", "--values", "5,10", "--out", str(target)]
        assert cli.main(args) == 0
        capsys.readouterr()
        first = target.read_bytes()
        assert cli.main(args) == 0
        capsys.readouterr()
        assert target.read_bytes() == first
        assert first.endswith(b"\n") and b"\r" not in first


class TestDesign:
    def test_fixture_reproduces_reference_numbers(self, capsys):
        code, payload = run_json(capsys, "design", "--fixture")
        assert code == 0
        report = payload["report"]
        assert report["feasible"] is True
        assert report["n_min"] == 10000.0
        assert 5e5 <= report["n_max"] <= 2e6
        assert 5e3 <= report["distinguishable_values"] <= 2e4
        assert abs(report["entropy_bits"] - 13.3) <= 0.5

    def test_impossible_targets_exit_3(self, capsys):
        code, payload = run_json(
            capsys, "design", "--fixture", "--eps-ba", "1e-12", "--eps-err", "1e-12"
        )
        assert code == 3
        assert payload["report"]["feasible"] is False
        assert payload["report"]["binding_constraints"]

    def test_missing_bounds_exit_2(self, capsys):
        code = cli.main(["design", "--eps-ba", "0.01", "--eps-err", "0.01", "--tau-p", "1"])
        capsys.readouterr()
        assert code == 2

    def test_csv_format_rejected(self, capsys):
        code = cli.main(["design", "--fixture", "--format", "csv"])
        capsys.readouterr()
        assert code == 2


class TestEntropy:
    def test_reference_values(self, capsys):
        code, payload = run_json(
            capsys, "entropy", "--n-min", "1e4", "--n-max", "1e6", "--err", "100"
        )
        assert code == 0
        assert abs(payload["entropy_bits"] - 13.273212809854334) <= 1e-9
        assert payload["distinguishable_values"] == 9900.0

    def test_invalid_range_exits_2(self, capsys):
        code = cli.main(["entropy", "--n-min", "10", "--n-max", "5", "--err", "1"])
        capsys.readouterr()
        assert code == 2


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"hamiltonian": "gauge-analog", "g": 0.5, "delta": 5.0}))
        code, payload = run_json(capsys, "qnd-check", "--config", str(cfg))
        assert code == 0
        assert payload["strong_condition"] is False
        code, payload = run_json(capsys, "qnd-check", "--config", str(cfg), "--g", "0")
        assert code == 0
        assert payload["strong_condition"] is True  # flag overrides config

    def test_unknown_config_key_exits_2(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"hamiltonian": "effective", "gg": 1.0}))
        code = cli.main(["qnd-check", "--config", str(cfg)])
        capsys.readouterr()
        assert code == 2

    def test_missing_config_file_exits_2(self, capsys):
        code = cli.main(["qnd-check", "--hamiltonian", "effective",
                         "--config", "/nonexistent/run.json"])
        capsys.readouterr()
        assert code == 2


class TestExitCodes:
    def test_numerical_integrity_failure_exits_4(self, capsys, monkeypatch):
        def boom(*args, **kwargs):
            raise NumericalIntegrityError("unitarity lost")

        monkeypatch.setattr(cli, "unitary_tensor", boom)
        code = cli.main(["qnd-check", "--hamiltonian", "effective"])
        err = capsys.readouterr().err
        assert code == 4
        assert "unitarity" in err
