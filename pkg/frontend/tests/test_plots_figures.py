import csv
import math

import numpy as np
import pytest

from vortexlab_plots import FigureSpec, MissingColumn, SchemaMismatch, render
from vortexlab_plots.figures import (fit_gap_exponents, fit_slope,
                                     monotone_badge, read_table)

TWO_OVER_PI = 2.0 / math.pi
LN2 = math.log(2.0)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows([[repr(float(v)) for v in r] for r in rows])


@pytest.fixture
def loglaw_csv(tmp_path):
    # three rows with exact slope 2/pi against n*ln2
    path = tmp_path / "loglaw.csv"
    rows = [(n, 0.1 + TWO_OVER_PI * n * LN2) for n in (3, 4, 5)]
    write_csv(path, ("n", "d1u1"), rows)
    return path


@pytest.fixture
def gaps_csv(tmp_path):
    # gap == nu in every functional: exponent exactly 1
    path = tmp_path / "gaps.csv"
    nus = (1e-2, 5e-3, 2.5e-3)
    write_csv(path, ("nu", "I_L", "II_S"), [(nu, nu, nu) for nu in nus])
    return path


@pytest.fixture
def sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    write_csv(path, ("n", "nu_n", "D_n", "S_n"),
              [(3, 0.5, 0.9, 0.28), (4, 0.018, 0.8, 0.70), (5, 7e-4, 0.7, 1.4)])
    return path


@pytest.fixture
def tracers_csv(tmp_path):
    path = tmp_path / "tracers.csv"
    header = ("seed_x1", "seed_x2", "t", "eta_1", "eta_2",
              "D11", "D12", "D21", "D22", "det")
    rows = [(0.0, 0.0, 0.1, 0.0, 0.0, 2.0, 0.01, 0.02, 0.5, 1.0),
            (0.1, 0.0, 0.1, 0.15, 0.0, 1.5, 0.02, 0.01, 0.667, 1.0005)]
    write_csv(path, header, rows)
    return path


class TestFits:
    def test_slope_exact(self):
        x = np.array([1.0, 2.0, 3.0])
        assert fit_slope(x, 0.3 + 0.42 * x) == pytest.approx(0.42, abs=1e-12)

    def test_gap_exponent_exact(self):
        nu = np.array([1e-2, 5e-3, 2.5e-3])
        exps = fit_gap_exponents({"nu": nu, "I_L": nu.copy(), "II_S": nu**2})
        assert exps["I_L"] == pytest.approx(1.0, abs=1e-12)
        assert exps["II_S"] == pytest.approx(2.0, abs=1e-12)

    def test_gap_needs_one_column(self):
        with pytest.raises(MissingColumn):
            fit_gap_exponents({"nu": np.array([1.0, 0.5, 0.25])})

    def test_monotone_badge(self):
        assert monotone_badge([1.0, 2.0, 3.0]) == "monotone: yes"
        assert monotone_badge([1.0, 3.0, 2.0]) == "monotone: no"


class TestReadTable:
    def test_round_trip(self, loglaw_csv):
        table = read_table(loglaw_csv)
        assert set(table) == {"n", "d1u1"}
        assert table["n"].tolist() == [3.0, 4.0, 5.0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaMismatch):
            read_table(tmp_path / "nope.csv")

    def test_empty_and_non_numeric(self, tmp_path):
        empty = tmp_path / "e.csv"
        empty.write_text("a,b\n")
        with pytest.raises(SchemaMismatch):
            read_table(empty)
        bad = tmp_path / "b.csv"
        bad.write_text("a,b\n1.0,hello\n")
        with pytest.raises(SchemaMismatch):
            read_table(bad)


class TestSpec:
    def test_bad_kind_rejected(self):
        with pytest.raises(SchemaMismatch):
            FigureSpec(inputs=("x.csv",), kind="pie", output="o.png")

    def test_no_inputs_rejected(self):
        with pytest.raises(SchemaMismatch):
            FigureSpec(inputs=(), kind="sweep", output="o.png")


class TestRender:
    def test_loglaw_exact_slope_annotation(self, loglaw_csv, tmp_path):
        out = tmp_path / "loglaw.png"
        notes = render(FigureSpec(inputs=(str(loglaw_csv),), kind="loglaw",
                                  output=str(out)))
        assert out.exists()
        assert notes == ["slope=0.6366"]

    def test_gaps_unit_exponent(self, gaps_csv, tmp_path):
        out = tmp_path / "gaps.png"
        notes = render(FigureSpec(inputs=(str(gaps_csv),), kind="gaps",
                                  output=str(out)))
        assert out.exists()
        assert "I_L exponent=1.00" in notes
        assert "II_S exponent=1.00" in notes

    def test_sweep_monotone_badge(self, sweep_csv, tmp_path):
        out = tmp_path / "sweep.png"
        notes = render(FigureSpec(inputs=(str(sweep_csv),), kind="sweep",
                                  output=str(out)))
        assert notes == ["S_n monotone: yes"]

    def test_deformation(self, tracers_csv, tmp_path):
        out = tmp_path / "def.png"
        notes = render(FigureSpec(inputs=(str(tracers_csv),),
                                  kind="deformation", output=str(out)))
        assert out.exists()
        assert notes[0].startswith("max |det-1|=")

    def test_gaps_time_series_schema(self, tmp_path):
        path = tmp_path / "gaps_ts.csv"
        write_csv(path, ("t", "I_L", "I_S", "II_L", "II_S"),
                  [(0.0, 0.0, 0.0, 0.0, 0.0), (0.05, 1e-4, 1e-5, 1e-3, 1e-2)])
        out = tmp_path / "ts.png"
        notes = render(FigureSpec(inputs=(str(path),), kind="gaps",
                                  output=str(out)))
        assert out.exists()
        assert notes[0] == "final I_L=1.000e-04"

    def test_missing_column_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_csv(path, ("n", "wrong"), [(3, 1.0)])
        with pytest.raises(MissingColumn):
            render(FigureSpec(inputs=(str(path),), kind="loglaw",
                              output=str(tmp_path / "o.png")))

    def test_deterministic_bytes(self, sweep_csv, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        spec = lambda p: FigureSpec(inputs=(str(sweep_csv),), kind="sweep",
                                    output=str(p))
        render(spec(a))
        render(spec(b))
        assert a.read_bytes() == b.read_bytes()
