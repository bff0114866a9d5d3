"""Inviscid-limit gap functionals.

Paired viscous/inviscid runs from identical data measure the squared L^2
gaps of the large- and small-scale velocities and vorticities, which are
then compared against the closed-form envelopes (linear in nu, with the
exponential stretching factor calE) and fitted for their nu-scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CflViolation, InsufficientSamples, MissingNorms
from .evolve import FlowState, StepConfig, step, measure
from .params import ParameterLadder
from .spectral import ScalarField2D, gradient, lp_norm

__all__ = ["GapRecord", "BoundEnvelope", "paired_run", "measured_calE",
           "envelope_eval", "scaling_fit"]


@dataclass(frozen=True)
class GapRecord:
    time: float
    I_L: float     # ||u_L^nu - u_L||_2^2
    I_S: float     # ||u_S^nu - u_S||_2^2
    II_L: float    # ||omega_L^nu - omega_L||_2^2
    II_S: float    # ||omega_S^nu - omega_S||_2^2

    COLUMNS = ("t", "I_L", "I_S", "II_L", "II_S")

    def row(self):
        return (self.time, self.I_L, self.I_S, self.II_L, self.II_S)


@dataclass(frozen=True)
class BoundEnvelope:
    A: float
    B: float
    t_star: float
    form: str
    calE: float
    value: float


def _gap_record(sv: FlowState, se: FlowState) -> GapRecord:
    grid = sv.grid
    dw = ScalarField2D(grid, sv.omega_L.values - se.omega_L.values)
    ds = ScalarField2D(grid, sv.u_S.values - se.u_S.values)
    vel_v = sv.velocity()
    vel_e = se.velocity()
    du1 = ScalarField2D(grid, vel_v.u1.values - vel_e.u1.values)
    du2 = ScalarField2D(grid, vel_v.u2.values - vel_e.u2.values)
    gds = gradient(ds)
    return GapRecord(
        time=sv.time,
        I_L=lp_norm(du1, 2) ** 2 + lp_norm(du2, 2) ** 2,
        I_S=lp_norm(ds, 2) ** 2,
        II_L=lp_norm(dw, 2) ** 2,
        II_S=lp_norm(gds.u1, 2) ** 2 + lp_norm(gds.u2, 2) ** 2,
    )


def paired_run(omega_L0: ScalarField2D, u_S0: ScalarField2D, nu: float,
               t_end: float, cfg: StepConfig, sample_every: int = 10,
               diagnostics: list | None = None) -> list[GapRecord]:
    """Advance the viscous (given nu) and inviscid systems in lockstep
    with a shared dt schedule; gap records compare states at identical
    times.  The inviscid run's diagnostics are appended to `diagnostics`
    (if provided) at the same sample times, for calE measurement.
    """
    sv = FlowState(0.0, omega_L0.copy(), u_S0.copy(), nu)
    se = FlowState(0.0, omega_L0.copy(), u_S0.copy(), 0.0)
    records = [_gap_record(sv, se)]
    if diagnostics is not None:
        diagnostics.append(measure(se))
    dt = cfg.dt
    quiet = 0
    k = 0
    while sv.time < t_end - 1e-14:
        dts = min(dt, t_end - sv.time)
        try:
            new_v, _ = step(sv, cfg, dt=dts)
            new_e, _ = step(se, cfg, dt=dts)
        except CflViolation:
            dt *= 0.5
            quiet = 0
            if dt < 1e-12:
                raise
            continue
        sv, se = new_v, new_e
        k += 1
        quiet += 1
        if quiet >= 100 and dt < cfg.dt:
            dt = min(cfg.dt, 2 * dt)
            quiet = 0
        at_end = sv.time >= t_end - 1e-14
        if k % sample_every == 0 or at_end:
            records.append(_gap_record(sv, se))
            if diagnostics is not None:
                diagnostics.append(measure(se))
    return records


def measured_calE(diagnostics, delta: float, omega_inf0: float = 1.0) -> float:
    """calE = exp((1+delta) * sup_t sup_x d1u1 / ||omega_L0||_inf) from a
    diagnostics time series."""
    sup = max(r.sup_d1u1 for r in diagnostics)
    return math.exp((1 + delta) * sup / omega_inf0)


def proxy_calE(ladder: ParameterLadder) -> float:
    """Asymptotic proxy ell_bar^(-(2/pi)(1+delta))."""
    return ladder.ell_bar ** (-(2.0 / math.pi) * (1 + ladder.delta))


_REQUIRED_NORMS = ("omega_L_l2", "omega_L_inf", "grad_omega_L_l2",
                   "grad_omega_L_inf", "omega_S_l2", "omega_S_inf",
                   "grad_omega_S_l2", "grad_omega_S_inf")


def envelope_eval(ladder: ParameterLadder, which: str, t: float, nu: float,
                  norms: dict, calE: float | None = None) -> BoundEnvelope:
    """Closed-form gap envelope with all absolute constants frozen to 1,
    evaluated with measured initial-data norms."""
    missing = [k for k in _REQUIRED_NORMS if k not in norms]
    if missing:
        raise MissingNorms(f"missing initial norms: {missing}")
    if calE is None:
        calE = proxy_calE(ladder)
    d = ladder.delta
    wL2, wLi = norms["omega_L_l2"], norms["omega_L_inf"]
    gL2, gLi = norms["grad_omega_L_l2"], norms["grad_omega_L_inf"]
    wS2, wSi = norms["omega_S_l2"], norms["omega_S_inf"]
    gS2, gSi = norms["grad_omega_S_l2"], norms["grad_omega_S_inf"]
    E2d = calE ** (2 * d)

    if which == "I_L":
        return BoundEnvelope(0.0, 0.0, 0.0, "linear-in-t", calE,
                             nu * t * wL2**2 * E2d)
    if which == "I_S":
        A = math.sqrt(nu) * wSi * wL2 * E2d
        B = nu * wS2**2 * E2d
        val = B**1.5 / A + t**3 * A**2
        return BoundEnvelope(A, B, math.sqrt(B) / A, "(B^{3/2}/A + t^3 A^2)-form",
                             calE, val)
    if which == "II_L":
        A = math.sqrt(nu) * gLi * wL2 * E2d
        B = nu * gL2**2 * E2d
        val = B**1.5 / A + t**3 * A**2
        return BoundEnvelope(A, B, math.sqrt(B) / A, "(B^{3/2}/A + t^3 A^2)-form",
                             calE, val)
    if which == "II_S":
        lf = math.log(1.0 / ladder.ell_bar)
        mix = d * (1 + d * lf) * gLi / wLi
        A = E2d * ((gSi + mix * wSi) * math.sqrt(d / wLi) * wL2
                   + wSi / math.sqrt(gLi * wL2)
                   * (gL2 * calE**(-d) + d * gLi * wL2 / wLi) ** 1.5)
        B = (gS2 + mix * wS2) ** 2 * E2d
        val = nu * (B / A + A * d / wLi) ** 2 * E2d
        return BoundEnvelope(A, B, B / A**2, "(B/A + tA)^2-form", calE, val)
    raise ValueError(f"unknown gap functional {which!r}")


def scaling_fit(nus, values) -> float:
    """Least-squares exponent p of value ~ nu^p on log-log axes."""
    nus = np.asarray(nus, dtype=float)
    values = np.asarray(values, dtype=float)
    if nus.size < 3:
        raise InsufficientSamples("need >= 3 viscosities")
    if np.max(nus) / np.min(nus) < 4.0:
        raise InsufficientSamples("viscosities must span at least a factor 4")
    if np.any(values <= 0):
        raise InsufficientSamples("gap values must be positive for a log fit")
    slope, _ = np.polyfit(np.log(nus), np.log(values), 1)
    return float(slope)
