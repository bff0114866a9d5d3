"""Standard figures from vortexlab CSV outputs.

The renderer is a pure function of the input files and the spec: fixed
style, no timestamps, no recomputation of physics beyond the fits that
are annotated on the axes.  Input schemas (column names) match the
solver's writers bit-exactly:

    loglaw       n, d1u1 [, d1u1_pv]
    deformation  seed_x1, seed_x2, t, eta_1, eta_2, D11, D12, D21, D22, det
    gaps         nu plus any of I_L, I_S, II_L, II_S
    sweep        n, nu_n, t_n, resolution, D_n, S_n, ...
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import MissingColumn, SchemaMismatch  # noqa: E402

__all__ = ["FigureSpec", "render", "read_table", "fit_slope",
           "fit_gap_exponents", "monotone_badge", "KINDS"]

TWO_OVER_PI = 2.0 / math.pi
LN2 = math.log(2.0)
KINDS = ("loglaw", "deformation", "gaps", "sweep")

_STYLE = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "vortexlab",
}
_GAP_COLUMNS = ("I_L", "I_S", "II_L", "II_S")


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input CSVs, kind, output path, axis/label options."""
    inputs: tuple
    kind: str
    output: str
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaMismatch(f"unknown figure kind {self.kind!r}; "
                                 f"expected one of {KINDS}")
        if not self.inputs:
            raise SchemaMismatch("figure spec needs at least one input CSV")


def read_table(path) -> dict:
    """CSV -> {column: float array}; non-numeric cells are rejected
    (the documented schemas are all-numeric)."""
    path = Path(path)
    if not path.exists():
        raise SchemaMismatch(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path} is empty") from None
        rows = list(reader)
    if not rows:
        raise SchemaMismatch(f"{path} has a header but no data rows")
    table = {}
    for j, name in enumerate(header):
        try:
            table[name] = np.array([float(r[j]) for r in rows])
        except (ValueError, IndexError) as exc:
            raise SchemaMismatch(
                f"{path} column {name!r} is not numeric/rectangular: {exc}"
            ) from None
    return table


def _need(table: dict, columns, path) -> None:
    missing = [c for c in columns if c not in table]
    if missing:
        raise MissingColumn(f"{path}: missing column(s) {missing}; "
                            f"header has {sorted(table)}")


def fit_slope(x, y) -> float:
    """Least-squares slope of y against x."""
    slope, _ = np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)
    return float(slope)


def fit_gap_exponents(table: dict) -> dict:
    """Log-log exponents value ~ nu^p for every gap column present."""
    nu = table["nu"]
    out = {}
    for name in _GAP_COLUMNS:
        if name in table and np.all(table[name] > 0):
            out[name] = fit_slope(np.log(nu), np.log(table[name]))
    if not out:
        raise MissingColumn("gaps figure needs at least one positive gap "
                            f"column among {_GAP_COLUMNS}")
    return out


def monotone_badge(values) -> str:
    """'monotone: yes' iff the sequence is strictly increasing."""
    v = np.asarray(values, float)
    return "monotone: " + ("yes" if np.all(np.diff(v) > 0) else "no")


def _finish(fig, ax, spec: FigureSpec) -> list:
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlabel:
        ax.set_xlabel(spec.xlabel)
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    # strip creation metadata so identical inputs give identical bytes
    meta = {"Date": None} if out.suffix == ".svg" else {"Software": None}
    fig.savefig(out, metadata=meta)
    plt.close(fig)


def _render_loglaw(spec: FigureSpec) -> list:
    table = read_table(spec.inputs[0])
    _need(table, ("n", "d1u1"), spec.inputs[0])
    n, d1u1 = table["n"], table["d1u1"]
    x = n * LN2                       # = ln(1/ell_bar)
    slope = fit_slope(x, d1u1)
    fig, ax = plt.subplots()
    ax.plot(x, d1u1, "o-", label="measured $\\partial_1 u_1(0)$")
    if "d1u1_pv" in table:
        ax.plot(x, table["d1u1_pv"], "s--", ms=4, label="PV oracle")
    ref = d1u1[0] + TWO_OVER_PI * (x - x[0])
    ax.plot(x, ref, "k:", label="slope $2/\\pi$ reference")
    ax.annotate(f"slope={slope:.4f}", xy=(0.05, 0.92),
                xycoords="axes fraction")
    ax.set_xlabel("$n\\,\\ln 2$")
    ax.set_ylabel("$\\partial_1 u_1(t=0,\\,0)$")
    ax.legend(loc="lower right")
    _finish(fig, ax, spec)
    return [f"slope={slope:.4f}"]


def _render_deformation(spec: FigureSpec) -> list:
    table = read_table(spec.inputs[0])
    _need(table, ("seed_x1", "seed_x2", "D11", "D12", "D21", "D22", "det"),
          spec.inputs[0])
    r = np.hypot(table["seed_x1"], table["seed_x2"])
    order = np.argsort(r, kind="stable")
    offdiag = (np.abs(table["D12"]) + np.abs(table["D21"])) / table["D11"]
    det_err = float(np.max(np.abs(table["det"] - 1.0)))
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(8.4, 4.2))
    ax.semilogy(r[order], table["D11"][order], "o-", label="$\\partial_1\\eta_1$")
    ax.semilogy(r[order], np.maximum(offdiag[order], 1e-16), "s--", ms=4,
                label="off-diagonal ratio")
    ax.set_xlabel("seed distance from origin")
    ax.set_ylabel("deformation entries")
    ax.legend(loc="best")
    ax2.plot(r[order], table["det"][order] - 1.0, "o-")
    ax2.set_xlabel("seed distance from origin")
    ax2.set_ylabel("$\\det D\\eta - 1$")
    ax2.annotate(f"max |det-1|={det_err:.2e}", xy=(0.05, 0.92),
                 xycoords="axes fraction")
    _finish(fig, ax, spec)
    return [f"max |det-1|={det_err:.2e}"]


def _render_gaps(spec: FigureSpec) -> list:
    table = read_table(spec.inputs[0])
    if "nu" not in table and "t" in table:
        return _render_gap_series(spec, table)
    _need(table, ("nu",), spec.inputs[0])
    exps = fit_gap_exponents(table)
    fig, ax = plt.subplots()
    notes = []
    for name, p in exps.items():
        ax.loglog(table["nu"], table[name], "o-",
                  label=f"{name}  ($\\nu^{{{p:.2f}}}$)")
        notes.append(f"{name} exponent={p:.2f}")
    nu = table["nu"]
    anchor = table[next(iter(exps))]
    ax.loglog(nu, anchor[0] * nu / nu[0], "k:", label="slope 1 reference")
    ax.set_xlabel("$\\nu$")
    ax.set_ylabel("squared $L^2$ gap")
    ax.legend(loc="best")
    _finish(fig, ax, spec)
    return notes


def _render_sweep(spec: FigureSpec) -> list:
    table = read_table(spec.inputs[0])
    _need(table, ("n", "D_n", "S_n"), spec.inputs[0])
    n = table["n"]
    badge = monotone_badge(table["S_n"])
    fig, ax = plt.subplots()
    ax.plot(n, table["S_n"], "o-", label="$S_n$")
    ax.plot(n, table["D_n"], "s--", ms=4, label="$D_n$")
    ax.annotate(f"$S_n$ {badge}", xy=(0.05, 0.92), xycoords="axes fraction")
    ax.set_xlabel("$n$")
    ax.set_ylabel("dissipation functionals")
    ax.set_xticks(n)
    ax.legend(loc="best")
    _finish(fig, ax, spec)
    return [f"S_n {badge}"]


def _render_gap_series(spec: FigureSpec, table: dict) -> list:
    # single paired run: gaps against time instead of a nu-scaling fit
    present = [c for c in _GAP_COLUMNS if c in table]
    if not present:
        raise MissingColumn("gaps time series needs at least one column "
                            f"among {_GAP_COLUMNS}")
    fig, ax = plt.subplots()
    notes = []
    for name in present:
        ax.plot(table["t"], table[name], label=name)
        notes.append(f"final {name}={table[name][-1]:.3e}")
    ax.set_xlabel("$t$")
    ax.set_ylabel("squared $L^2$ gap")
    ax.legend(loc="best")
    _finish(fig, ax, spec)
    return notes


_RENDERERS = {
    "loglaw": _render_loglaw,
    "deformation": _render_deformation,
    "gaps": _render_gaps,
    "sweep": _render_sweep,
}


def render(spec: FigureSpec) -> list:
    """Render one figure; returns the annotation strings drawn on it."""
    with plt.rc_context(_STYLE):
        return _RENDERERS[spec.kind](spec)
