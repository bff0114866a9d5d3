import math

import numpy as np
import pytest

from vortexlab.errors import (InsufficientSamples, NonFinite, OutsideRegion,
                              TooCloseToSingularity)
from vortexlab.evolve import DiagnosticsRecord, FlowState, StepConfig, measure, run_to
from vortexlab.params import (build_ladder, build_large_scale,
                              build_small_scale, measure_initial_norms)
from vortexlab.spectral import ScalarField2D, TorusGrid
from vortexlab.velgrad import (TWO_OVER_PI, BoundCheck, GradSample,
                               check_global_bounds, check_local_bounds,
                               grad_at, pv_oracle, second_gradient_bound,
                               vorticity_gradient_growth)


def ladder_state(n, N, nu=0.0, with_small=False):
    lad = build_ladder(n, 0.1, 0.4)
    grid = TorusGrid(lad.L, N)
    w = build_large_scale(lad, grid)
    if with_small:
        s = build_small_scale(lad, grid)
    else:
        s = ScalarField2D(grid, np.zeros_like(w.values))
    return lad, FlowState(0.0, w, s, nu)


class TestGradAt:
    def test_zero_field(self):
        grid = TorusGrid(1.0, 64)
        z = ScalarField2D(grid, np.zeros((64, 64)))
        state = FlowState(0.0, z, z, 0.0)
        s = grad_at(state, (0.3, -0.2))
        assert np.max(np.abs(s.matrix)) == 0.0

    def test_single_mode_closed_form(self):
        # omega = sin(pi x1) sin(pi x2) gives
        # u = (sin(pi x1)cos(pi x2), -cos(pi x1)sin(pi x2)) / (2 pi)
        grid = TorusGrid(1.0, 64)
        x1, x2 = grid.meshes()
        w = ScalarField2D(grid, np.sin(np.pi * x1) * np.sin(np.pi * x2))
        state = FlowState(0.0, w, ScalarField2D(grid, np.zeros((64, 64))), 0.0)
        p = (0.3, 0.15)
        c1, s1 = math.cos(math.pi * p[0]), math.sin(math.pi * p[0])
        c2, s2 = math.cos(math.pi * p[1]), math.sin(math.pi * p[1])
        expect = 0.5 * np.array([[c1 * c2, -s1 * s2], [s1 * s2, -c1 * c2]])
        s = grad_at(state, p)
        assert np.max(np.abs(s.matrix - expect)) < 1e-12

    def test_trace_free_enforced(self):
        bad = GradSample(0.0, (0.0, 0.0),
                         np.array([[1.0, 0.0], [0.0, 1.0]]), "spectral")
        with pytest.raises(NonFinite):
            bad.check_trace()

    def test_axis_antisymmetry(self):
        # the four-quadrant field is odd in x1, so d2u1 vanishes on x1 = 0
        lad, state = ladder_state(4, 256)
        s = grad_at(state, (0.0, 0.6 * lad.radius_D))
        assert abs(s.matrix[0, 1]) < 1e-10 * abs(s.matrix[0, 0])


class TestPvOracle:
    def test_agrees_with_spectral(self):
        lad, state = ladder_state(4, 256)
        spec = grad_at(state, (0.0, 0.0)).matrix
        orc = pv_oracle(state.omega_L, (0.0, 0.0))
        assert np.max(np.abs(orc - spec)) <= 1e-2 * np.max(np.abs(spec))

    def test_agrees_off_origin(self):
        lad, state = ladder_state(4, 256)
        p = (0.4 * lad.radius_D, -0.3 * lad.radius_D)
        spec = grad_at(state, p).matrix
        orc = pv_oracle(state.omega_L, p)
        assert np.max(np.abs(orc - spec)) <= 1e-2 * np.max(np.abs(spec))

    def test_radial_annulus_zero_gradient_at_center(self):
        # radial vorticity supported in an annulus induces zero velocity
        # (hence zero gradient) at its center
        grid = TorusGrid(1.0, 256)
        x1, x2 = grid.meshes()
        r = np.sqrt(x1**2 + x2**2)
        w = np.where((r > 0.2) & (r < 0.3),
                     np.sin(np.pi * (r - 0.2) / 0.1) ** 2, 0.0)
        field = ScalarField2D(grid, w)
        orc = pv_oracle(field, (0.0, 0.0))
        assert np.max(np.abs(orc)) < 5e-3 * np.max(np.abs(w))

    def test_too_close_to_singularity(self):
        # an unmollified sign field jumps by 2 across the axis; evaluating
        # on the jump invalidates the symmetric-cancellation argument
        grid = TorusGrid(1.0, 256)
        x1, x2 = grid.meshes()
        w = ScalarField2D(grid, np.sign(x1) * np.sign(x2))
        with pytest.raises(TooCloseToSingularity):
            pv_oracle(w, (0.0, 0.5))

    def test_structure_of_returned_matrix(self):
        lad, state = ladder_state(3, 128)
        m = pv_oracle(state.omega_L, (0.0, 0.0))
        assert m[0, 0] == -m[1, 1]
        assert m[0, 1] == -m[1, 0]


class TestLogLaw:
    def test_local_bounds_at_origin(self):
        lad, state = ladder_state(4, 256)
        checks = check_local_bounds(state, lad)
        assert all(c.passed for c in checks)
        diag = checks[0]
        assert diag.name.startswith("d1u1")
        assert diag.measured > 0

    def test_outside_region_rejected(self):
        lad, state = ladder_state(4, 256)
        with pytest.raises(OutsideRegion):
            check_local_bounds(state, lad, points=[(0.5, 0.5)])

    def test_slope_matches_two_over_pi(self):
        # d1u1(0) vs ln(1/ell_bar) across three rungs of the ladder; the
        # least-squares slope must sit within 15% of 2/pi
        xs, ys = [], []
        for n, N in ((3, 128), (4, 256), (5, 512)):
            lad, state = ladder_state(n, N)
            xs.append(math.log(1.0 / lad.ell_bar))
            ys.append(grad_at(state, (0.0, 0.0)).matrix[0, 0])
        slope = np.polyfit(xs, ys, 1)[0]
        assert abs(slope - TWO_OVER_PI) <= 0.15 * TWO_OVER_PI

    def test_global_bounds(self):
        lad, state = ladder_state(4, 256)
        checks = check_global_bounds(state, lad)
        assert all(c.passed for c in checks)
        assert checks[0].name == "sup_d1u1"


class TestGrowthBounds:
    @staticmethod
    def _record(t, sup, g2, ginf):
        return DiagnosticsRecord(time=t, energy=1.0, enstrophy_L=1.0,
                                 enstrophy_S=0.0, dissipation=0.0,
                                 sup_d1u1=sup, omega_L_l2=1.0, omega_L_inf=1.0,
                                 u_S_inf=0.0, grad_omega_L_l2=g2,
                                 grad_omega_L_inf=ginf)

    def test_synthetic_exact_growth_passes(self):
        # grad norm growing exactly like exp(integral of sup d1u1)
        recs = [self._record(t, 2.0, math.exp(2.0 * t), math.exp(2.0 * t))
                for t in np.linspace(0.0, 0.5, 11)]
        chk = vorticity_gradient_growth(recs, p=2, delta=0.1)
        assert chk.passed

    def test_synthetic_violation_fails(self):
        recs = [self._record(t, 1.0, math.exp(5.0 * t), 1.0)
                for t in np.linspace(0.0, 0.5, 11)]
        chk = vorticity_gradient_growth(recs, p=2, delta=0.1)
        assert not chk.passed

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples):
            vorticity_gradient_growth([self._record(0.0, 1.0, 1.0, 1.0)])

    def test_real_run_growth_bounded(self):
        lad, state = ladder_state(3, 256, nu=lad_nu(3))
        history = []
        run_to(state, lad.t_n, StepConfig(dt=lad.t_n / 16),
               observers=[lambda s: history.append(measure(s))])
        chk = vorticity_gradient_growth(history, p=2, delta=lad.delta)
        assert chk.passed

    def test_second_gradient_bound_initial(self):
        lad, state = ladder_state(3, 256)
        norms0 = measure_initial_norms(state.omega_L, state.u_S)
        chk = second_gradient_bound(state, lad, norms0)
        assert chk.passed
        assert chk.measured > 0


def lad_nu(n):
    return build_ladder(n, 0.1, 0.4).nu_n
