"""Parameter ladder and initial fields.

For index n the ladder fixes every length/amplitude scale of the
construction: the torus half-period L, the smoothing scale ell of the
four-quadrant sign vorticity, the small-scale blob radius ell_tilde, the
shear amplitude M, the viscosity nu_n and the time horizon t_n.  All
unspecified absolute constants are frozen to 1 and every (1 +- C*delta)
correction to (1 +- delta); the frozen choices are emitted in run
manifests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DegenerateLadder, ResolutionTooCoarse, UnsupportedRange
from .spectral import (ScalarField2D, TorusGrid, antisymmetrize_odd_odd,
                       gradient, lp_norm)

__all__ = ["ParameterLadder", "build_ladder", "build_large_scale",
           "build_small_scale", "measure_initial_norms"]

N_MIN, N_MAX = 3, 10


@dataclass(frozen=True)
class ParameterLadder:
    n: int
    delta: float
    kappa: float
    c_small: float
    a0_bar: float
    ell_bar: float          # 2^-n
    gamma: float
    L: float                # torus half-period
    ell: float              # ell_bar * L
    ell_tilde: float        # ell^(1 + c_small*delta)
    q: float                # math.inf on the a0 <= 1/2 branch
    two_over_q: float
    M: float                # analytic shear amplitude ell_tilde^(-1-2/q)
    nu_n: float
    t_n: float
    radius_D: float         # ell_tilde
    radius_D_prime: float   # ell_tilde * ell_bar^(c_small*delta)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["q"] = None if math.isinf(self.q) else self.q
        return d


def build_ladder(n: int, delta: float, a0_bar: float, kappa: float = 0.5,
                 c_small: float = 1.0, q_override: float | None = None) -> ParameterLadder:
    """Assemble every parameter for index n.

    Branches on a0_bar: for a0_bar <= 1/2 the torus stays at L = 1 and the
    small-scale amplitude is normalized directly in L^2 (the q -> inf
    limit); for a0_bar > 1/2 the torus shrinks as L = ell_bar^gamma and q
    follows gamma.
    """
    if not (N_MIN <= n <= N_MAX) or int(n) != n:
        raise UnsupportedRange(f"n must be an integer in [{N_MIN}, {N_MAX}], got {n}")
    if not (0 < delta <= 0.25):
        raise UnsupportedRange(f"delta must be in (0, 0.25], got {delta}")
    if not (0 < a0_bar < 1):
        raise UnsupportedRange(f"a0_bar must be in (0, 1), got {a0_bar}")
    if not (0 < kappa <= 0.5):
        raise UnsupportedRange(f"kappa must be in (0, 1/2], got {kappa}")
    if c_small <= 0:
        raise UnsupportedRange("c_small must be positive")

    ell_bar = 2.0 ** (-n)
    if a0_bar <= 0.5:
        gamma = 0.0
        L = 1.0
    else:
        gamma = ((2 * a0_bar - 1) * (1 + delta) - delta) / ((1 - a0_bar) * (1 + delta))
        L = ell_bar ** gamma
    ell = ell_bar * L
    ell_tilde = ell ** (1 + c_small * delta)

    # local-gradient lemma requires ell_tilde <= ell * ell_bar^delta (c = 1)
    if ell_tilde > ell * ell_bar**delta * (1 + 1e-9):
        raise DegenerateLadder(
            f"ell_tilde={ell_tilde:g} exceeds ell*ell_bar^delta={ell * ell_bar**delta:g}")

    if q_override is not None:
        q = float(q_override)
    elif a0_bar <= 0.5:
        q = math.inf
    else:
        q = 2.0 / (1.0 - gamma / ((1 + gamma) * (1 + delta)))
    two_over_q = 0.0 if math.isinf(q) else 2.0 / q

    M = ell_tilde ** (-1.0 - two_over_q)
    nu_n = (ell_bar ** (4 * delta * (1 - delta))) * (ell ** (4 * (1 + delta))) / (delta**4 * L**2)
    t_n = delta  # peak large-scale vorticity is 1 by construction

    return ParameterLadder(
        n=int(n), delta=delta, kappa=kappa, c_small=c_small, a0_bar=a0_bar,
        ell_bar=ell_bar, gamma=gamma, L=L, ell=ell, ell_tilde=ell_tilde,
        q=q, two_over_q=two_over_q, M=M, nu_n=nu_n, t_n=t_n,
        radius_D=ell_tilde,
        radius_D_prime=ell_tilde * ell_bar ** (c_small * delta),
    )


def _bump_profile(r: np.ndarray) -> np.ndarray:
    """Smooth radial bump supported in the unit ball (not normalized)."""
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t<=0, 1 for t>=1."""
    def psi(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out
    t = np.clip(t, 0.0, 1.0)
    a = psi(t)
    b = psi(1.0 - t)
    return a / (a + b + 1e-300)


def build_large_scale(ladder: ParameterLadder, grid: TorusGrid) -> ScalarField2D:
    """Mollified four-quadrant sign vorticity, odd in x1 and in x2.

    The sign pattern is cut to {ell < |x1|, |x2| < L - ell}, then convolved
    with the radial bump scaled to radius kappa*ell.  Mollification is done
    by spectral multiplication (exactly periodic); the result is projected
    onto the odd-odd symmetry class so the antisymmetry is exact on nodes.
    """
    L, ell, kappa = ladder.L, ladder.ell, ladder.kappa
    if abs(grid.half_period - L) > 1e-12 * L:
        raise ValueError(f"grid half-period {grid.half_period} != ladder L {L}")
    if grid.h > kappa * ell / 4 * (1 + 1e-9):
        raise ResolutionTooCoarse(
            f"h={grid.h:g} too coarse for mollification scale kappa*ell={kappa * ell:g}")

    x1, x2 = grid.meshes()
    cut = ((np.abs(x1) > ell) & (np.abs(x1) < L - ell)
           & (np.abs(x2) > ell) & (np.abs(x2) < L - ell))
    indicator = np.sign(x1) * np.sign(x2) * cut

    # mollifier sampled on the grid, wrapped; unit mass enforced discretely
    r = np.sqrt(np.minimum(np.abs(x1), 2 * L - np.abs(x1)) ** 2
                + np.minimum(np.abs(x2), 2 * L - np.abs(x2)) ** 2) / (kappa * ell)
    phi = _bump_profile(r)
    phi /= grid.h**2 * np.sum(phi)

    conv = np.fft.irfft2(np.fft.rfft2(indicator) * np.fft.rfft2(phi),
                         s=indicator.shape) * grid.h**2
    conv = antisymmetrize_odd_odd(conv)
    # quadrature wiggle can overshoot |1| by ~1e-16; clamp to the sign range
    np.clip(conv, -1.0, 1.0, out=conv)
    return ScalarField2D(grid, conv)


def build_small_scale(ladder: ParameterLadder, grid: TorusGrid) -> ScalarField2D:
    """Vertical shear blob u3 = M * x2 * chi(|x|/ell_tilde) at the origin.

    chi is a smooth radial cutoff, identically 1 inside the tracer region
    radius and 0 outside |x| = ell_tilde.  The amplitude is rescaled so the
    L^2 norm of the horizontal curl pair equals ell_tilde^(-2/q) exactly.
    """
    lt = ladder.ell_tilde
    rp = ladder.radius_D_prime
    if abs(grid.half_period - ladder.L) > 1e-12 * ladder.L:
        raise ValueError("grid half-period does not match ladder L")
    if grid.h > rp / 4 * (1 + 1e-9):
        raise ResolutionTooCoarse(
            f"h={grid.h:g} too coarse for inner blob radius {rp:g}")

    x1, x2 = grid.meshes()
    s = np.sqrt(x1**2 + x2**2) / lt
    s0 = rp / lt
    chi = _smoothstep((1.0 - s) / (1.0 - s0))
    chi[s <= s0] = 1.0
    chi[s >= 1.0] = 0.0
    u = ladder.M * x2 * chi
    field = ScalarField2D(grid, u)

    g = gradient(field)
    norm = math.sqrt(lp_norm(g.u1, 2) ** 2 + lp_norm(g.u2, 2) ** 2)
    target = lt ** (-ladder.two_over_q)
    field.values *= target / norm
    field.values[s >= 1.0] = 0.0   # keep the support exact after rescaling
    return ScalarField2D(grid, field.values)


def measure_initial_norms(omega_L: ScalarField2D, u_S: ScalarField2D) -> dict:
    """Norms of the initial data used by envelope formulas (measured, not
    the asymptotic approximations)."""
    from .spectral import velocity_from_vorticity
    gL = gradient(omega_L)
    gS = gradient(u_S)      # horizontal curl pair of u_S up to a rotation
    uL = velocity_from_vorticity(omega_L)
    g11 = gradient(gS.u1)
    g22 = gradient(gS.u2)
    grad_omega_S_l2 = math.sqrt(lp_norm(g11.u1, 2) ** 2 + lp_norm(g11.u2, 2) ** 2
                                + lp_norm(g22.u1, 2) ** 2 + lp_norm(g22.u2, 2) ** 2)
    grad_omega_S_inf = max(lp_norm(g11.u1, np.inf), lp_norm(g11.u2, np.inf),
                           lp_norm(g22.u1, np.inf), lp_norm(g22.u2, np.inf))
    return {
        "omega_L_inf": lp_norm(omega_L, np.inf),
        "omega_L_l2": lp_norm(omega_L, 2),
        "grad_omega_L_l2": math.sqrt(lp_norm(gL.u1, 2) ** 2 + lp_norm(gL.u2, 2) ** 2),
        "grad_omega_L_inf": max(lp_norm(gL.u1, np.inf), lp_norm(gL.u2, np.inf)),
        "omega_S_l2": math.sqrt(lp_norm(gS.u1, 2) ** 2 + lp_norm(gS.u2, 2) ** 2),
        "omega_S_inf": max(lp_norm(gS.u1, np.inf), lp_norm(gS.u2, np.inf)),
        "grad_omega_S_l2": grad_omega_S_l2,
        "grad_omega_S_inf": grad_omega_S_inf,
        "u_L_l2": math.sqrt(lp_norm(uL.u1, 2) ** 2 + lp_norm(uL.u2, 2) ** 2),
        "u_S_l2": lp_norm(u_S, 2),
    }
