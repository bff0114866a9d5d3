"""Lagrangian tracers: flow-map trajectories and deformation gradients.

Tracers integrate d(eta)/dt = u_L(t, eta) and d(Deta)/dt =
grad u_L(t, eta) . Deta with RK4 whose stage velocities are the field
solver's own stage values (strong synchronization), so the only extra
error scale is spatial interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (SeedOutsideRegion, StageUnavailable, ViscousRun)
from .evolve import FlowState, StepConfig, run_to
from .params import ParameterLadder
from .spectral import gradient, lp_norm, sample_many, spline_coefficients
from .velgrad import TWO_OVER_PI, BoundCheck

__all__ = ["TracerEnsemble", "standard_seeds", "advance", "check_yudovich",
           "check_lld", "cauchy_check"]


@dataclass
class TracerEnsemble:
    seeds: np.ndarray        # (k, 2) initial points
    positions: np.ndarray    # (k, 2) current eta(t, x)
    deformations: np.ndarray  # (k, 2, 2) current Deta(t, x)
    time: float

    @classmethod
    def from_seeds(cls, seeds) -> "TracerEnsemble":
        seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
        k = seeds.shape[0]
        D = np.broadcast_to(np.eye(2), (k, 2, 2)).copy()
        return cls(seeds.copy(), seeds.copy(), D, 0.0)

    def det(self) -> np.ndarray:
        return np.linalg.det(self.deformations)

    def copy(self) -> "TracerEnsemble":
        return TracerEnsemble(self.seeds.copy(), self.positions.copy(),
                              self.deformations.copy(), self.time)


def standard_seeds(ladder: ParameterLadder) -> np.ndarray:
    """3x3 lattice inside the inner region plus the origin and the axis
    points (0, +-r'), deduplicated."""
    rp = ladder.radius_D_prime
    a = rp / math.sqrt(2.0) * 0.9
    pts = [(i * a / 1.0, j * a / 1.0) for i in (-1, 0, 1) for j in (-1, 0, 1)]
    pts += [(0.0, rp), (0.0, -rp)]
    seeds = np.array(sorted(set(pts)))
    for p in seeds:
        if math.hypot(*p) > rp * (1 + 1e-12):
            raise SeedOutsideRegion(f"seed {tuple(p)} outside |x| <= {rp:g}")
    return seeds


def _stage_eval(stage, pts):
    """(velocities, gradients) of one stage at tracer points, bicubic."""
    if stage.grad is None:
        raise StageUnavailable("stage gradient fields were not collected")
    vel = stage.velocity
    u1 = sample_many(vel.u1, pts, coeffs=spline_coefficients(vel.u1.values))
    u2 = sample_many(vel.u2, pts, coeffs=spline_coefficients(vel.u2.values))
    G = np.empty((pts.shape[0], 2, 2))
    for (i, j), f in zip(((0, 0), (0, 1), (1, 0), (1, 1)), stage.grad):
        G[:, i, j] = sample_many(f, pts, coeffs=spline_coefficients(f.values))
    return np.stack([u1, u2], axis=-1), G


def _tracer_rk4(ens: TracerEnsemble, stages, dt: float):
    x, D = ens.positions, ens.deformations

    v1, G1 = _stage_eval(stages[0], x)
    k1x, k1D = v1, np.einsum("kij,kjl->kil", G1, D)

    v2, G2 = _stage_eval(stages[1], x + 0.5 * dt * k1x)
    k2x = v2
    k2D = np.einsum("kij,kjl->kil", G2, D + 0.5 * dt * k1D)

    v3, G3 = _stage_eval(stages[2], x + 0.5 * dt * k2x)
    k3x = v3
    k3D = np.einsum("kij,kjl->kil", G3, D + 0.5 * dt * k2D)

    v4, G4 = _stage_eval(stages[3], x + dt * k3x)
    k4x = v4
    k4D = np.einsum("kij,kjl->kil", G4, D + dt * k3D)

    ens.positions = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    ens.deformations = D + dt / 6.0 * (k1D + 2 * k2D + 2 * k3D + k4D)
    ens.time = stages[3].time


def advance(ensemble: TracerEnsemble, state: FlowState, t_end: float,
            cfg: StepConfig, observers=()):
    """Run the flow to t_end with tracers carried in lockstep.

    Returns (ensemble, final_state).  Gradient interpolation for Deta uses
    bicubic sampling of the solver's spectral stage gradients.
    """
    ens = ensemble.copy()

    def hook(old, new, stages):
        _tracer_rk4(ens, stages, new.time - old.time)

    final = run_to(state, t_end, cfg, observers=observers, step_hook=hook)
    ens.time = final.time
    return ens, final


def check_yudovich(ensemble: TracerEnsemble, pairs, ladder: ParameterLadder,
                   c_const: float = 2.0, omega_inf: float = 1.0) -> list[BoundCheck]:
    """Two-sided Hoelder flow-separation estimate for seeded pairs:
    (d0/L)^(1+a) <= d(t)/L <= (d0/L)^(1-a) with a = c*t*||omega0||_inf."""
    L = ladder.L
    a = c_const * ensemble.time * omega_inf
    out = []
    for (i, j) in pairs:
        d0 = np.linalg.norm(ensemble.seeds[i] - ensemble.seeds[j]) / L
        dt_ = np.linalg.norm(ensemble.positions[i] - ensemble.positions[j]) / L
        if d0 <= 0 or d0 > 0.5:
            continue
        out.append(BoundCheck.make(f"yudovich[{i},{j}]", dt_,
                                   d0 ** (1 + a), d0 ** (1 - a),
                                   abs(math.log(dt_ / d0))))
    return out


def check_lld(ensemble: TracerEnsemble, ladder: ParameterLadder,
              slack: float = 0.4) -> list[BoundCheck]:
    """Large-Lagrangian-deformation envelopes per seed: ln d1eta1 against
    (2/pi)*t*(1 -+ (slack+delta))*ln(1/ell_bar); the off-diagonal ratio
    (|d1eta2|+|d2eta1|)/d1eta1 is reported as the measured slack."""
    rp = ladder.radius_D_prime
    lf = math.log(1.0 / ladder.ell_bar)
    band = slack + ladder.delta
    t = ensemble.time
    out = []
    for s, D in zip(ensemble.seeds, ensemble.deformations):
        if math.hypot(*s) > rp * (1 + 1e-12):
            raise SeedOutsideRegion(f"seed {tuple(s)} outside the inner region")
        d1e1 = D[0, 0]
        ratio = (abs(D[1, 0]) + abs(D[0, 1])) / max(d1e1, 1e-300)
        val = math.log(d1e1) if d1e1 > 0 else -math.inf
        out.append(BoundCheck.make(
            f"lld@({s[0]:.3g},{s[1]:.3g})", val,
            TWO_OVER_PI * t * (1 - band) * lf,
            TWO_OVER_PI * t * (1 + band) * lf, ratio))
    return out


def cauchy_check(state0: FlowState, state_t: FlowState,
                 ensemble: TracerEnsemble) -> float:
    """Residual of the vorticity-transport identity
    omega_S(t, eta(t,x)) = Deta(t,x) . omega_S0(x), normalized by
    ||omega_S0||_inf.  Only valid for inviscid runs."""
    if state_t.nu != 0.0 or state0.nu != 0.0:
        raise ViscousRun("the transport identity holds only for nu = 0")
    if abs(state_t.time - ensemble.time) > 1e-12:
        raise ValueError("ensemble and state_t are not synchronized")

    g0 = gradient(state0.u_S)
    gt = gradient(state_t.u_S)
    # horizontal curl pair of the vertical velocity: (d2 u_S, -d1 u_S)
    w0 = np.stack([
        sample_many(g0.u2, ensemble.seeds, coeffs=spline_coefficients(g0.u2.values)),
        -sample_many(g0.u1, ensemble.seeds, coeffs=spline_coefficients(g0.u1.values)),
    ], axis=-1)
    wt = np.stack([
        sample_many(gt.u2, ensemble.positions, coeffs=spline_coefficients(gt.u2.values)),
        -sample_many(gt.u1, ensemble.positions, coeffs=spline_coefficients(gt.u1.values)),
    ], axis=-1)
    predicted = np.einsum("kij,kj->ki", ensemble.deformations, w0)
    norm0 = max(lp_norm(g0.u1, np.inf), lp_norm(g0.u2, np.inf))
    return float(np.max(np.abs(wt - predicted)) / norm0)
