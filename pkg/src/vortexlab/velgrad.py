"""Velocity-gradient diagnostics.

Verifies the pointwise log law inside the small ball around the origin,
the global sup bounds, the vorticity-gradient growth estimate, and the
second-gradient bound.  An independent principal-value quadrature of the
singular kernels serves as the oracle for the spectral evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (InsufficientSamples, NonFinite, OutsideRegion,
                     TooCloseToSingularity)
from .evolve import FlowState
from .params import ParameterLadder
from .spectral import (ScalarField2D, gradient, lp_norm, sample_at,
                       velocity_from_vorticity)

__all__ = ["GradSample", "BoundCheck", "grad_at", "pv_oracle",
           "check_local_bounds", "check_global_bounds",
           "vorticity_gradient_growth", "second_gradient_bound",
           "TWO_OVER_PI"]

TWO_OVER_PI = 2.0 / math.pi


@dataclass(frozen=True)
class GradSample:
    time: float
    point: tuple[float, float]
    matrix: np.ndarray      # [[d1u1, d2u1], [d1u2, d2u2]]
    source: str             # "spectral" | "oracle"

    def check_trace(self, tol: float = 1e-8):
        amax = np.max(np.abs(self.matrix))
        if amax > 0 and abs(self.matrix[0, 0] + self.matrix[1, 1]) > tol * amax:
            raise NonFinite(f"gradient sample not trace-free: {self.matrix}")


@dataclass(frozen=True)
class BoundCheck:
    name: str
    measured: float
    lower_envelope: float
    upper_envelope: float
    slack_epsilon_n: float
    passed: bool

    @classmethod
    def make(cls, name, measured, lo, hi, eps=float("nan")):
        return cls(name, float(measured), float(lo), float(hi), float(eps),
                   bool(lo <= measured <= hi))


def grad_at(state: FlowState, point) -> GradSample:
    """Velocity-gradient matrix at one point by spectral differentiation
    of u_L, trigonometric interpolation at the point."""
    vel = state.velocity()
    g1 = gradient(vel.u1)
    g2 = gradient(vel.u2)
    point = np.asarray(point, dtype=float)
    mat = np.array([[sample_at(g1.u1, point), sample_at(g1.u2, point)],
                    [sample_at(g2.u1, point), sample_at(g2.u2, point)]])
    s = GradSample(state.time, (float(point[0]), float(point[1])), mat, "spectral")
    s.check_trace()
    return s


def pv_oracle(omega: ScalarField2D, point, n_images: int = 5,
              exclusion_factor: float = 2.0) -> np.ndarray:
    """Velocity gradient at `point` by direct principal-value quadrature.

    Midpoint rule on the field's own nodes over [-L, L)^2 with periodic
    images out to n_images periods per axis; cells inside the symmetric
    exclusion disc of radius exclusion_factor*h are dropped (the PV limit
    of each odd kernel over a symmetric disc vanishes).  The off-diagonal
    formula assumes omega vanishes near the point, which is checked.
    """
    omega.check_finite("omega")
    grid = omega.grid
    L, h = grid.half_period, grid.h
    point = np.asarray(point, dtype=float)
    x1, x2 = grid.meshes()
    r_excl = exclusion_factor * h

    # The kernels jump by O(|omega| jump) across a discontinuity; require
    # the field to be numerically smooth (and small) inside the exclusion
    # disc, otherwise the symmetric-cancellation argument fails.
    near = (np.minimum(np.abs(x1 - point[0]), 2 * L - np.abs(x1 - point[0])) ** 2
            + np.minimum(np.abs(x2 - point[1]), 2 * L - np.abs(x2 - point[1])) ** 2) <= (r_excl + h) ** 2
    amax = np.max(np.abs(omega.values))
    if amax > 0 and near.any():
        patch = omega.values[near]
        if np.max(np.abs(patch)) > 0.1 * amax and np.ptp(patch) > 0.5 * amax:
            raise TooCloseToSingularity(
                "vorticity varies by O(max) inside the exclusion disc")

    d1u1 = 0.0
    d1u2 = 0.0
    w = omega.values
    for i in range(-n_images, n_images + 1):
        for j in range(-n_images, n_images + 1):
            z1 = x1 + 2 * L * i - point[0]
            z2 = x2 + 2 * L * j - point[1]
            r2 = z1**2 + z2**2
            keep = r2 > r_excl**2
            r4 = np.where(keep, r2**2, 1.0)
            d1u1 += np.sum(np.where(keep, z1 * z2 / r4 * w, 0.0))
            d1u2 += np.sum(np.where(keep, 0.5 * (z1**2 - z2**2) / r4 * w, 0.0))
    d1u1 *= h**2 / math.pi
    d1u2 *= h**2 / math.pi
    return np.array([[d1u1, -d1u2], [d1u2, -d1u1]])


def _log_factor(ladder: ParameterLadder) -> float:
    return math.log(1.0 / ladder.ell_bar)


def check_local_bounds(state: FlowState, ladder: ParameterLadder,
                       points=None, slack: float = 0.4,
                       c_offdiag: float = 0.3) -> list[BoundCheck]:
    """Pointwise log law inside the small ball |x| <= radius_D.

    d1u1 is checked against (2/pi)*ln(1/ell_bar)*(1 -+ (delta+slack));
    the off-diagonal sum against c_offdiag * d1u1.  The measured slack
    |d1u1/((2/pi)ln(1/ell_bar)) - 1| is reported on each diagonal check.
    """
    if points is None:
        points = [(0.0, 0.0)]
    lf = _log_factor(ladder)
    band = ladder.delta + slack
    checks = []
    for p in points:
        p = np.asarray(p, dtype=float)
        if math.hypot(p[0], p[1]) > ladder.radius_D * (1 + 1e-12):
            raise OutsideRegion(f"point {tuple(p)} outside |x| <= {ladder.radius_D:g}")
        sample = grad_at(state, p)
        d1u1 = sample.matrix[0, 0]
        off = abs(sample.matrix[0, 1]) + abs(sample.matrix[1, 0])
        eps = abs(d1u1 / (TWO_OVER_PI * lf) - 1.0)
        checks.append(BoundCheck.make(
            f"d1u1@({p[0]:.3g},{p[1]:.3g})", d1u1,
            TWO_OVER_PI * (1 - band) * lf, TWO_OVER_PI * (1 + band) * lf, eps))
        checks.append(BoundCheck.make(
            f"offdiag@({p[0]:.3g},{p[1]:.3g})", off, 0.0,
            c_offdiag * max(d1u1, 0.0), off / max(d1u1, 1e-300)))
    return checks


def check_global_bounds(state: FlowState, ladder: ParameterLadder,
                        k1_const: float = 1.5,
                        k2_const: float = 8.0) -> list[BoundCheck]:
    """Sup bounds over all nodes: sup d1u1 <= K1*ln(1/ell_bar) and
    sup(|d2u1| + |d1u2|) <= K2*delta*ln(1/ell_bar)."""
    vel = state.velocity()
    g1 = gradient(vel.u1)
    g2 = gradient(vel.u2)
    lf = _log_factor(ladder)
    sup_diag = float(np.max(np.abs(g1.u1.values)))
    sup_off = float(np.max(np.abs(g1.u2.values) + np.abs(g2.u1.values)))
    return [
        BoundCheck.make("sup_d1u1", sup_diag, 0.0, k1_const * lf,
                        sup_diag / lf),
        BoundCheck.make("sup_offdiag", sup_off, 0.0,
                        k2_const * ladder.delta * lf, sup_off / lf),
    ]


def vorticity_gradient_growth(history, p: float = 2.0,
                              c_delta: float = 1.0,
                              delta: float = 0.1,
                              slack: float = 1e-2) -> BoundCheck:
    """||grad omega_L(t)||_p <= ||grad omega_L(0)||_p *
    exp((1+c*delta) * int_0^t sup d1u1), checked at the final record.

    history: DiagnosticsRecord list carrying grad-norm and sup_d1u1 series.
    """
    if len(history) < 2:
        raise InsufficientSamples("need at least 2 records")
    times = np.array([r.time for r in history])
    sup = np.array([r.sup_d1u1 for r in history])
    integral = float(np.trapezoid(sup, times))
    if p == 2:
        g0, gt = history[0].grad_omega_L_l2, history[-1].grad_omega_L_l2
    else:
        g0, gt = history[0].grad_omega_L_inf, history[-1].grad_omega_L_inf
    measured = math.log(gt / g0) if g0 > 0 else 0.0
    envelope = (1 + c_delta * delta) * integral + slack
    return BoundCheck.make(f"grad_omega_growth_p{p:g}", measured,
                           -math.inf, envelope, measured - integral)


def second_gradient_bound(state: FlowState, ladder: ParameterLadder,
                          norms0: dict, sup_d1u1_integral: float | None = None,
                          c_env: float = 20.0) -> BoundCheck:
    """Sup over the small ball of all second derivatives of u_L vs the
    envelope C*(1 + t*ln(1/ell_bar)) * ||grad omega_L0||_inf *
    exp((1+delta) * int sup d1u1)."""
    vel = state.velocity()
    grid = state.grid
    x1, x2 = grid.meshes()
    in_ball = (x1**2 + x2**2) <= ladder.radius_D**2
    sup2 = 0.0
    for comp in (vel.u1, vel.u2):
        g = gradient(comp)
        for d in (g.u1, g.u2):
            gg = gradient(d)
            sup2 = max(sup2, float(np.max(np.abs(gg.u1.values[in_ball]))),
                       float(np.max(np.abs(gg.u2.values[in_ball]))))
    t = state.time
    lf = _log_factor(ladder)
    if sup_d1u1_integral is None:
        sup_d1u1_integral = t * TWO_OVER_PI * lf
    env = (c_env * (1 + t * lf) * norms0["grad_omega_L_inf"]
           * math.exp((1 + ladder.delta) * sup_d1u1_integral))
    return BoundCheck.make("second_gradient", sup2, 0.0, env,
                           sup2 / max(norms0["grad_omega_L_inf"], 1e-300))
