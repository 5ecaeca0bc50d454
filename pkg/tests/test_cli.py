"""Command-line harness: exit codes, output formats, determinism."""

import json

import numpy as np
import pytest
import yaml

from ofdma_swipt.cli import (EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NOT_CONVERGED,
                             EXIT_OK, main)


def write_config(tmp_path, name="cfg.yaml", **overrides):
    data = {
        "system": {"K1": 2, "K2": 2, "N": 8, "P_max_dBm": 37,
                   "sigma2_dBm": -83, "Qbar_uW": 100},
        "scheme": "optimal",
    }
    for section, value in overrides.items():
        if isinstance(value, dict) and section in data:
            data[section].update(value)
        else:
            data[section] = value
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


class TestSolveCommand:
    def test_exit_ok_and_report_contents(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "report.json"
        assert main(["solve", "--config", cfg, "--seed", "1",
                     "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["feasible"] is True
        assert report["duality_gap_bps_hz"] >= -1e-9
        assert len(report["harvested_w"]) == 2
        assert all(q >= 100e-6 - 1e-9 for q in report["harvested_w"])

    def test_infeasible_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, system={"Qbar_uW": 1e12})
        assert main(["solve", "--config", cfg]) == EXIT_INFEASIBLE

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("scheme: optimal\n")  # no system section
        assert main(["solve", "--config", str(bad)]) == EXIT_CONFIG

    def test_not_converged_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, solver={"max_iter": 2})
        assert main(["solve", "--config", cfg,
                     "--out", str(tmp_path / "r.json")]) == EXIT_NOT_CONVERGED


class TestSweepCommand:
    def test_csv_schema_and_determinism(self, tmp_path):
        cfg = write_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sweep", "--config", cfg, "--axis", "Qbar",
                "--values", "50,100", "--trials", "2", "--seed", "3"]
        assert main(argv + ["--out", str(out1)]) == EXIT_OK
        assert main(argv + ["--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()
        lines = out1.read_text().strip().splitlines()
        header = [l for l in lines if not l.startswith("#")][0]
        assert header == ("axis_value,trial,scheme,objective,gap,"
                          "feasible,iterations,wallclock")
        rows = [l.split(",") for l in lines if not l.startswith("#")][1:]
        assert len(rows) == 4
        assert all(r[7] == "0" for r in rows)  # no timing by default

    def test_infeasible_rows_recorded_not_fatal(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "c.csv"
        assert main(["sweep", "--config", cfg, "--axis", "Qbar",
                     "--values", "100,1e12", "--trials", "1",
                     "--out", str(out)]) == EXIT_OK
        rows = [l.split(",") for l in out.read_text().splitlines()
                if not l.startswith("#")][1:]
        assert rows[0][5] == "1" and rows[1][5] == "0"
        assert rows[1][3] == "nan"

    def test_objective_reproducible_by_solve(self, tmp_path):
        cfg = write_config(tmp_path)
        out_csv = tmp_path / "d.csv"
        main(["sweep", "--config", cfg, "--axis", "N", "--values", "8",
              "--trials", "1", "--seed", "9", "--out", str(out_csv)])
        row = [l.split(",") for l in out_csv.read_text().splitlines()
               if not l.startswith("#")][1]
        out_json = tmp_path / "d.json"
        main(["solve", "--config", cfg, "--seed", "9", "--out", str(out_json)])
        report = json.loads(out_json.read_text())
        assert float(row[3]) == pytest.approx(report["objective_bps_hz"],
                                              rel=1e-8)

    def test_bad_axis_rejected(self, tmp_path):
        cfg = write_config(tmp_path)
        with pytest.raises(SystemExit):
            main(["sweep", "--config", cfg, "--axis", "bogus",
                  "--values", "1"])


class TestProfileCommand:
    def test_per_sc_rows(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "p.csv"
        assert main(["profile", "--config", cfg, "--seed", "1",
                     "--out", str(out)]) == EXIT_OK
        rows = [l.split(",") for l in out.read_text().splitlines()
                if not l.startswith("#")]
        assert rows[0] == ["sc", "assigned_ir", "power", "alpha", "info_power"]
        body = rows[1:]
        assert len(body) == 8
        for sc, ir, p, a, info in body:
            assert float(info) == pytest.approx(
                (1.0 - float(a)) * float(p), rel=1e-6, abs=1e-15)

    def test_pinned_split_shows_in_profile(self, tmp_path):
        cfg = write_config(tmp_path, scheme="alpha05")
        out = tmp_path / "p2.csv"
        main(["profile", "--config", cfg, "--out", str(out)])
        body = [l.split(",") for l in out.read_text().splitlines()
                if not l.startswith("#")][1:]
        assigned = [r for r in body if int(r[1]) >= 0 and float(r[2]) > 0]
        assert assigned
        assert all(float(r[3]) == 0.5 for r in assigned)


class TestGapCommand:
    def test_two_line_csv(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "g.csv"
        assert main(["gap", "--config", cfg, "--seed", "5",
                     "--out", str(out)]) == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "num_scs,seed,objective,duality_gap,iterations"
        vals = lines[1].split(",")
        assert vals[0] == "8" and vals[1] == "5"
        assert float(vals[3]) >= -1e-9
