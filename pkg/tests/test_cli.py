import json

import numpy as np
import pytest

from vortexlab.cli import main
from vortexlab.io import load_field, read_csv


class TestGenData:
    def test_writes_fields_and_manifest(self, tmp_path):
        out = tmp_path / "data"
        rc = main(["gen-data", "--n", "3", "--out", str(out)])
        assert rc == 0
        field, time, fid = load_field(out / "omega_L0.field")
        assert fid == "omega_L" and time == 0.0
        assert field.grid.resolution == 256
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["config"]["n"] == 3
        assert "config_hash" in doc and "initial_norms" in doc

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(f"n = 4\ndelta = 0.1\nout = {tmp_path / 'a'}\n")
        rc = main(["gen-data", "--config", str(cfg), "--n", "3"])
        assert rc == 0
        doc = json.loads((tmp_path / "a" / "manifest.json").read_text())
        assert doc["config"]["n"] == 3          # flag wins over config file


class TestRun:
    def test_diagnostics_csv(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["run", "--n", "3", "--nu", "0", "--t-end", "0.02",
                   "--sample-every", "1", "--out", str(out)])
        assert rc == 0
        cols, rows = read_csv(out / "diagnostics.csv")
        assert cols[:3] == ["t", "energy", "enstrophy_L"]
        assert rows[0][0] == 0.0
        assert rows[-1][0] == pytest.approx(0.02)
        # inviscid: energy column flat to solver accuracy
        assert abs(rows[-1][1] - rows[0][1]) < 1e-8 * rows[0][1]


class TestPair:
    def test_gaps_csv(self, tmp_path):
        out = tmp_path / "pair"
        rc = main(["pair", "--n", "3", "--t-end", "0.02",
                   "--sample-every", "1", "--out", str(out)])
        assert rc == 0
        cols, rows = read_csv(out / "gaps.csv")
        assert cols == ["t", "I_L", "I_S", "II_L", "II_S"]
        assert rows[0][1:] == [0.0, 0.0, 0.0, 0.0]
        assert rows[-1][1] > 0


class TestTracers:
    def test_tracers_csv_and_checks(self, tmp_path):
        out = tmp_path / "tr"
        rc = main(["tracers", "--n", "3", "--t-end", "0.02", "--out", str(out)])
        assert rc == 0
        cols, rows = read_csv(out / "tracers.csv")
        assert cols[0] == "seed_x1" and cols[-1] == "det"
        assert len(rows) == 11
        assert all(abs(r[-1] - 1.0) < 1e-6 for r in rows)


class TestSweep:
    def test_single_point_csv(self, tmp_path, monkeypatch):
        monkeypatch.setenv("VSL_THREADS", "1")
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--n", "3", "--out", str(out)])
        assert rc == 0
        cols, rows = read_csv(out)
        assert cols[0] == "n" and "S_n" in cols
        assert len(rows) == 1 and rows[0][0] == 3.0

    def test_bitwise_deterministic(self, tmp_path, monkeypatch):
        monkeypatch.setenv("VSL_THREADS", "1")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--n", "3", "--out", str(a)]) == 0
        assert main(["sweep", "--n", "3", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestVerify:
    def test_quick_passes(self, capsys):
        rc = main(["verify", "--quick"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "PASS" in out and "FAIL" not in out


class TestErrors:
    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 2

    def test_domain_error_exit_1(self, tmp_path, capsys):
        # n=11 is outside the supported ladder range
        rc = main(["gen-data", "--n", "11", "--out", str(tmp_path)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err
