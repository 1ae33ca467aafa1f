import json
import os

import pytest

from rabi2p.cli import main


def run_cli(args, tmp_path, monkeypatch, env=None):
    monkeypatch.chdir(tmp_path)
    if env:
        for k, v in env.items():
            monkeypatch.setenv(k, v)
    return main(args)


class TestConfigRejection:
    @pytest.mark.parametrize(
        "args",
        [
            ["scan", "--backend", "chen", "--omega", "1.5"],
            ["scan", "--backend", "chen", "--delta", "0"],
            ["scan", "--backend", "chen", "--sector", "odd+"],
            ["scan", "--backend", "oracle"],
            ["spectrum", "--backend", "travenec"],
            ["collapse", "--omegas", "2.5,1.9"],
            ["scan", "--grid", "4"],
        ],
    )
    def test_invalid_configs_exit_nonzero(self, args, tmp_path, monkeypatch, capsys):
        assert run_cli(args, tmp_path, monkeypatch) == 2
        assert "error:" in capsys.readouterr().err


class TestScan:
    def test_csv_schema_and_determinism(self, tmp_path, monkeypatch):
        args = [
            "scan", "--backend", "chen", "--omega", "2.5", "--delta", "0.7",
            "--grid", "64", "--output", "out.csv", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        first = (tmp_path / "out.csv").read_bytes()
        header = first.decode().splitlines()[0]
        assert header == "E,value,flags"
        assert run_cli(args, tmp_path, monkeypatch) == 0
        assert (tmp_path / "out.csv").read_bytes() == first

    def test_values_roundtrip_17_digits(self, tmp_path, monkeypatch):
        args = [
            "scan", "--backend", "chen", "--grid", "32",
            "--output", "out.csv", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        lines = (tmp_path / "out.csv").read_text().splitlines()[1:]
        for line in lines[:5]:
            e, value, flags = line.split(",")
            assert float(e) == float(format(float(e), ".17g"))
            assert flags.isdigit()

    def test_png_rendered_by_default(self, tmp_path, monkeypatch):
        args = [
            "scan", "--backend", "chen", "--grid", "32", "--output", "out.csv",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        assert (tmp_path / "out.png").exists()

    def test_travenec_schema_has_imaginary_column(self, tmp_path, monkeypatch):
        args = [
            "scan", "--backend", "travenec", "--grid", "32",
            "--output", "t.csv", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        header = (tmp_path / "t.csv").read_text().splitlines()[0]
        assert header == "E,value,value_imag,flags"

    def test_json_schema(self, tmp_path, monkeypatch):
        args = [
            "scan", "--backend", "zhang", "--grid", "32", "--format", "json",
            "--output", "out.json", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        payload = json.loads((tmp_path / "out.json").read_text())
        assert payload["schema_version"] == "1"
        row = payload["rows"][0]
        assert set(row) == {"E", "value", "near_pole", "huge", "not_converged"}
        assert isinstance(row["near_pole"], bool)

    def test_worker_env_does_not_change_bytes(self, tmp_path, monkeypatch):
        args = [
            "scan", "--backend", "chen", "--grid", "48",
            "--output", "out.csv", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        serial = (tmp_path / "out.csv").read_bytes()
        assert run_cli(args, tmp_path, monkeypatch, env={"RABI2P_THREADS": "2"}) == 0
        assert (tmp_path / "out.csv").read_bytes() == serial


class TestReports:
    @pytest.mark.slow
    def test_spectrum_json(self, tmp_path, monkeypatch):
        args = [
            "spectrum", "--omega", "2.5", "--delta", "0.7", "--levels", "4",
            "--format", "json", "--output", "spec.json", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        payload = json.loads((tmp_path / "spec.json").read_text())
        assert payload["schema_version"] == "1"
        assert len(payload["regular"]) >= 4
        assert not payload["regular"][0]["suspect"]

    def test_oracle_csv_and_plot(self, tmp_path, monkeypatch):
        args = [
            "oracle", "--omega", "2.5", "--delta", "0.7", "--levels", "3",
            "--output", "oracle.csv",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        lines = (tmp_path / "oracle.csv").read_text().splitlines()
        assert lines[0] == "sector,level,E,n_max,converged,truncation_warning"
        assert (tmp_path / "oracle.png").exists()

    @pytest.mark.slow
    def test_collapse_csv(self, tmp_path, monkeypatch):
        args = [
            "collapse", "--omegas", "2.5,2.2", "--levels", "6",
            "--output", "c.csv", "--no-plot",
        ]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        lines = (tmp_path / "c.csv").read_text().splitlines()
        assert lines[0] == "omega,mean_spacing,pole_gap,ratio,lowest_level,failed"
        assert len(lines) == 3

    def test_validate_subset(self, tmp_path, monkeypatch, capsys):
        args = ["validate", "--only", "1,2", "--output", "report.json", "--no-plot"]
        assert run_cli(args, tmp_path, monkeypatch) == 0
        out = capsys.readouterr().out
        assert "PASS criterion 1" in out
        assert "PASS criterion 2" in out
        assert "PASS criterion 9" in out
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["all_passed"] is True
        assert [c["id"] for c in payload["criteria"]] == [1, 2, 9]
