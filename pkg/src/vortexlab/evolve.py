"""Time integration of the decoupled 2+1/2-dimensional system.

The vertical vorticity omega_L obeys the 2D vorticity equation (Euler for
nu = 0, Navier-Stokes otherwise) and the vertical velocity u_S is a
passive scalar advected and diffused by the horizontal velocity recovered
from omega_L.  The small scale never feeds back on the large scale.

Scheme: classical RK4 on the dealiased advection term combined with the
exact spectral integrating factor exp(-nu*|k|^2*dt) for diffusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (BlowupDetected, CflViolation, InsufficientSamples,
                     NonFinite)
from .spectral import (ScalarField2D, TorusGrid, VectorField2D, dealias,
                       lp_norm, velocity_from_vorticity)

__all__ = ["FlowState", "StepConfig", "StageField", "step", "run_to",
           "DiagnosticsRecord", "measure", "energy_balance_residual"]


@dataclass(frozen=True)
class FlowState:
    time: float
    omega_L: ScalarField2D
    u_S: ScalarField2D
    nu: float = 0.0

    @property
    def grid(self) -> TorusGrid:
        return self.omega_L.grid

    def velocity(self) -> VectorField2D:
        return velocity_from_vorticity(self.omega_L)


@dataclass
class StepConfig:
    dt: float
    cfl_cap: float = 0.5
    blowup_factor: float = 1.0e6
    # filled in lazily from the first state seen; used for blowup detection
    initial_max: float = field(default=0.0, repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class StageField:
    """Velocity (and gradient, for tracer coupling) at one RK4 stage."""
    time: float
    velocity: VectorField2D
    grad: tuple[ScalarField2D, ScalarField2D, ScalarField2D, ScalarField2D] | None
    # grad order: (d1u1, d2u1, d1u2, d2u2)


def _nonlinear(omega_hat: np.ndarray, uS_hat: np.ndarray, grid: TorusGrid,
               want_grad: bool):
    """Dealiased advection tendencies -F(u.grad omega), -F(u.grad u_S).

    Returns (N_omega_hat, N_uS_hat, velocity, grad_fields)."""
    N = grid.resolution
    k1, k2 = grid.wavenumbers()
    k2sq = grid.k_squared()
    inv = np.zeros_like(k2sq)
    np.divide(1.0, k2sq, out=inv, where=k2sq > 0)
    psi_hat = -omega_hat * inv
    u1_hat = -1j * k2 * psi_hat
    u2_hat = 1j * k1 * psi_hat

    u1 = np.fft.irfft2(u1_hat, s=(N, N))
    u2 = np.fft.irfft2(u2_hat, s=(N, N))
    d1w = np.fft.irfft2(1j * k1 * omega_hat, s=(N, N))
    d2w = np.fft.irfft2(1j * k2 * omega_hat, s=(N, N))
    d1s = np.fft.irfft2(1j * k1 * uS_hat, s=(N, N))
    d2s = np.fft.irfft2(1j * k2 * uS_hat, s=(N, N))

    Nw = -dealias(np.fft.rfft2(u1 * d1w + u2 * d2w), grid)
    Ns = -dealias(np.fft.rfft2(u1 * d1s + u2 * d2s), grid)

    vel = VectorField2D(ScalarField2D(grid, u1, u1_hat),
                        ScalarField2D(grid, u2, u2_hat))
    grad = None
    if want_grad:
        grad = (ScalarField2D.from_hat(grid, 1j * k1 * u1_hat),
                ScalarField2D.from_hat(grid, 1j * k2 * u1_hat),
                ScalarField2D.from_hat(grid, 1j * k1 * u2_hat),
                ScalarField2D.from_hat(grid, 1j * k2 * u2_hat))
    return Nw, Ns, vel, grad


def step(state: FlowState, cfg: StepConfig, dt: float | None = None,
         collect_stages: bool = False):
    """Advance one step of size dt (default cfg.dt).

    Returns (new_state, stages); stages is a 4-tuple of StageField when
    collect_stages is set (times t, t+dt/2, t+dt/2, t+dt), else None.
    """
    if dt is None:
        dt = cfg.dt
    grid = state.grid
    wh = dealias(state.omega_L.hat, grid)
    sh = dealias(state.u_S.hat, grid)

    a_w, a_s, vel0, g0 = _nonlinear(wh, sh, grid, collect_stages)

    umax = max(np.max(np.abs(vel0.u1.values)), np.max(np.abs(vel0.u2.values)))
    if umax * dt > cfg.cfl_cap * grid.h * (1 + 1e-12):
        raise CflViolation(f"dt={dt:g} exceeds CFL limit {cfg.cfl_cap * grid.h / max(umax, 1e-300):g}")

    nu = state.nu
    k2sq = grid.k_squared()
    E = np.exp(-0.5 * nu * k2sq * dt)
    E2 = E * E

    w1 = E * (wh + 0.5 * dt * a_w)
    s1 = E * (sh + 0.5 * dt * a_s)
    b_w, b_s, vel1, g1 = _nonlinear(w1, s1, grid, collect_stages)

    w2 = E * wh + 0.5 * dt * b_w
    s2 = E * sh + 0.5 * dt * b_s
    c_w, c_s, vel2, g2 = _nonlinear(w2, s2, grid, collect_stages)

    w3 = E2 * wh + dt * E * c_w
    s3 = E2 * sh + dt * E * c_s
    d_w, d_s, vel3, g3 = _nonlinear(w3, s3, grid, collect_stages)

    wn = E2 * wh + dt / 6.0 * (E2 * a_w + 2.0 * E * (b_w + c_w) + d_w)
    sn = E2 * sh + dt / 6.0 * (E2 * a_s + 2.0 * E * (b_s + c_s) + d_s)

    new = FlowState(state.time + dt,
                    ScalarField2D.from_hat(grid, wn),
                    ScalarField2D.from_hat(grid, sn), nu)
    new.omega_L.check_finite("omega_L")
    new.u_S.check_finite("u_S")

    stages = None
    if collect_stages:
        t, h2 = state.time, 0.5 * dt
        stages = (StageField(t, vel0, g0),
                  StageField(t + h2, vel1, g1),
                  StageField(t + h2, vel2, g2),
                  StageField(t + dt, vel3, g3))
    return new, stages


def run_to(state: FlowState, t_end: float, cfg: StepConfig,
           observers=(), step_hook=None) -> FlowState:
    """March to t_end (last step shortened to land exactly).

    observers: callables (state) invoked on the initial state and after
    every accepted step.  step_hook, if given, is called as
    step_hook(old_state, new_state, stages) with collect_stages enabled
    (used for tracer coupling).  The CFL cap is enforced by automatic dt
    halving; dt re-doubles (never above cfg.dt) after 100 quiet steps.
    """
    if t_end < state.time - 1e-15:
        raise ValueError("t_end precedes state.time")
    init_wmax = lp_norm(state.omega_L, np.inf)
    init_smax = lp_norm(state.u_S, np.inf)
    for obs in observers:
        obs(state)
    dt = cfg.dt
    quiet = 0
    while state.time < t_end - 1e-14:
        dt_step = min(dt, t_end - state.time)
        try:
            collect = step_hook is not None
            new, stages = step(state, cfg, dt=dt_step, collect_stages=collect)
        except CflViolation:
            dt *= 0.5
            quiet = 0
            if dt < 1e-12:
                raise
            continue
        if step_hook is not None:
            step_hook(state, new, stages)
        state = new
        wmax = lp_norm(state.omega_L, np.inf)
        smax = lp_norm(state.u_S, np.inf)
        if (init_wmax > 0 and wmax > cfg.blowup_factor * init_wmax) or \
           (init_smax > 0 and smax > cfg.blowup_factor * init_smax):
            raise BlowupDetected(f"norm blowup at t={state.time:g}")
        for obs in observers:
            obs(state)
        quiet += 1
        if quiet >= 100 and dt < cfg.dt:
            dt = min(cfg.dt, 2 * dt)
            quiet = 0
    return state


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    energy: float          # (1/2)(||u_L||_2^2 + ||u_S||_2^2)
    enstrophy_L: float     # ||omega_L||_2^2
    enstrophy_S: float     # ||grad u_S||_2^2 = ||omega_S||_2^2
    dissipation: float     # nu * (enstrophy_L + enstrophy_S)
    sup_d1u1: float
    omega_L_l2: float
    omega_L_inf: float
    u_S_inf: float
    grad_omega_L_l2: float
    grad_omega_L_inf: float

    COLUMNS = ("t", "energy", "enstrophy_L", "enstrophy_S", "diss",
               "sup_d1u1", "omega_L_l2", "omega_L_inf", "u_S_inf",
               "grad_omega_L_l2", "grad_omega_L_inf")

    def row(self):
        return (self.time, self.energy, self.enstrophy_L, self.enstrophy_S,
                self.dissipation, self.sup_d1u1, self.omega_L_l2,
                self.omega_L_inf, self.u_S_inf, self.grad_omega_L_l2,
                self.grad_omega_L_inf)


def measure(state: FlowState) -> DiagnosticsRecord:
    """Standard diagnostics of one snapshot (all norms via node quadrature)."""
    from .spectral import gradient
    grid = state.grid
    vel = state.velocity()
    gS = gradient(state.u_S)
    gL = gradient(state.omega_L)
    k1, _ = grid.wavenumbers()
    d1u1 = np.fft.irfft2(1j * k1 * vel.u1.hat, s=(grid.resolution,) * 2)

    uL_sq = lp_norm(vel.u1, 2) ** 2 + lp_norm(vel.u2, 2) ** 2
    uS_sq = lp_norm(state.u_S, 2) ** 2
    ens_L = lp_norm(state.omega_L, 2) ** 2
    ens_S = lp_norm(gS.u1, 2) ** 2 + lp_norm(gS.u2, 2) ** 2
    return DiagnosticsRecord(
        time=state.time,
        energy=0.5 * (uL_sq + uS_sq),
        enstrophy_L=ens_L,
        enstrophy_S=ens_S,
        dissipation=state.nu * (ens_L + ens_S),
        sup_d1u1=float(np.max(d1u1)),
        omega_L_l2=math.sqrt(ens_L),
        omega_L_inf=lp_norm(state.omega_L, np.inf),
        u_S_inf=lp_norm(state.u_S, np.inf),
        grad_omega_L_l2=math.sqrt(lp_norm(gL.u1, 2) ** 2 + lp_norm(gL.u2, 2) ** 2),
        grad_omega_L_inf=max(lp_norm(gL.u1, np.inf), lp_norm(gL.u2, np.inf)),
    )


def energy_balance_residual(history, nu: float) -> float:
    """Discrete defect of d/dt (1/2)||u||_2^2 = -nu ||grad u||_2^2.

    Interval slopes of the sampled energy are compared with the trapezoid
    average of the sampled dissipation, normalized by the initial
    dissipation rate (plus the initial energy as a floor so inviscid runs
    report a meaningful relative drift).
    """
    if len(history) < 3:
        raise InsufficientSamples("need at least 3 diagnostics records")
    ref = nu * (history[0].enstrophy_L + history[0].enstrophy_S) + history[0].energy
    worst = 0.0
    for a, b in zip(history[:-1], history[1:]):
        dtime = b.time - a.time
        if dtime <= 0:
            continue
        slope = (b.energy - a.energy) / dtime
        diss = 0.5 * (a.dissipation + b.dissipation)
        worst = max(worst, abs(slope + diss) / ref)
    return worst
