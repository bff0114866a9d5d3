import math

import numpy as np
import pytest

from vortexlab.errors import InsufficientSamples, MissingNorms
from vortexlab.evolve import StepConfig
from vortexlab.gaps import (GapRecord, envelope_eval, measured_calE,
                            paired_run, proxy_calE, scaling_fit)
from vortexlab.params import (build_ladder, build_large_scale,
                              build_small_scale, measure_initial_norms)
from vortexlab.spectral import ScalarField2D, TorusGrid


@pytest.fixture(scope="module")
def ladder_setup():
    lad = build_ladder(3, 0.1, 0.4)
    grid = TorusGrid(lad.L, 256)
    w = build_large_scale(lad, grid)
    s = build_small_scale(lad, grid)
    norms = measure_initial_norms(w, s)
    return lad, w, s, norms


class TestPairedRun:
    def test_zero_viscosity_gives_zero_gaps(self, ladder_setup):
        lad, w, s, _ = ladder_setup
        recs = paired_run(w, s, 0.0, 0.02, StepConfig(dt=0.005))
        for r in recs:
            assert r.I_L == 0.0 and r.I_S == 0.0
            assert r.II_L == 0.0 and r.II_S == 0.0

    def test_gaps_positive_and_increasing(self, ladder_setup):
        lad, w, s, _ = ladder_setup
        recs = paired_run(w, s, lad.nu_n, lad.t_n,
                          StepConfig(dt=lad.t_n / 16), sample_every=4)
        assert recs[0].I_L == 0.0
        vals = [r.I_L for r in recs[1:]]
        assert all(v > 0 for v in vals)
        assert vals[-1] >= vals[0]
        assert recs[-1].II_S > 0

    def test_gap_vanishes_at_least_linearly_in_nu(self, ladder_setup):
        # the linear-in-nu envelope is an upper bound; the measured squared
        # gap decays with an effective exponent between 1 (fully damped
        # high modes) and 2 (perturbative regime) -- about 1.6 here
        lad, w, s, _ = ladder_setup
        cfg = StepConfig(dt=lad.t_n / 16)
        nus = [lad.nu_n / f for f in (8, 16, 32)]
        vals = [paired_run(w, s, nu, lad.t_n, cfg)[-1].I_L for nu in nus]
        assert vals[0] > vals[1] > vals[2] > 0
        assert 1.0 <= scaling_fit(nus, vals) <= 2.2

    def test_diagnostics_collected(self, ladder_setup):
        lad, w, s, _ = ladder_setup
        diags = []
        recs = paired_run(w, s, lad.nu_n, 0.05, StepConfig(dt=0.0125),
                          sample_every=2, diagnostics=diags)
        assert len(diags) == len(recs)
        assert diags[0].time == 0.0


class TestEnvelopes:
    def test_missing_norms_rejected(self, ladder_setup):
        lad, _, _, _ = ladder_setup
        with pytest.raises(MissingNorms):
            envelope_eval(lad, "I_L", 0.1, lad.nu_n, {"omega_L_l2": 1.0})

    def test_unknown_functional(self, ladder_setup):
        lad, _, _, norms = ladder_setup
        with pytest.raises(ValueError):
            envelope_eval(lad, "nope", 0.1, lad.nu_n, norms)

    def test_I_L_closed_form(self, ladder_setup):
        lad, _, _, norms = ladder_setup
        env = envelope_eval(lad, "I_L", 0.1, lad.nu_n, norms, calE=2.0)
        expect = lad.nu_n * 0.1 * norms["omega_L_l2"] ** 2 * 2.0 ** (2 * lad.delta)
        assert env.value == pytest.approx(expect, rel=1e-12)

    def test_envelopes_monotone_in_t_and_nu(self, ladder_setup):
        lad, _, _, norms = ladder_setup
        for which in ("I_L", "I_S", "II_L"):
            v1 = envelope_eval(lad, which, 0.05, lad.nu_n, norms).value
            v2 = envelope_eval(lad, which, 0.10, lad.nu_n, norms).value
            assert 0 <= v1 <= v2
        for which in ("I_L", "I_S", "II_L", "II_S"):
            v1 = envelope_eval(lad, which, 0.1, lad.nu_n / 4, norms).value
            v2 = envelope_eval(lad, which, 0.1, lad.nu_n, norms).value
            assert v1 < v2

    def test_II_S_nu_free_coefficients(self, ladder_setup):
        # the II_S envelope is linear in nu with nu-independent A, B
        lad, _, _, norms = ladder_setup
        e1 = envelope_eval(lad, "II_S", 0.1, lad.nu_n, norms)
        e2 = envelope_eval(lad, "II_S", 0.1, lad.nu_n / 8, norms)
        assert e1.A == e2.A and e1.B == e2.B
        assert e1.value / e2.value == pytest.approx(8.0, rel=1e-12)

    def test_measured_gaps_below_envelopes(self, ladder_setup):
        lad, w, s, norms = ladder_setup
        diags = []
        recs = paired_run(w, s, lad.nu_n, lad.t_n,
                          StepConfig(dt=lad.t_n / 16), diagnostics=diags)
        calE = measured_calE(diags, lad.delta)
        last = recs[-1]
        for which, got in (("I_L", last.I_L), ("I_S", last.I_S),
                           ("II_L", last.II_L), ("II_S", last.II_S)):
            env = envelope_eval(lad, which, lad.t_n, lad.nu_n, norms, calE=calE)
            assert got <= env.value, f"{which}: {got} > {env.value}"


class TestCalE:
    def test_measured_calE(self):
        class R:
            def __init__(self, s):
                self.sup_d1u1 = s
        assert measured_calE([R(1.0), R(2.0)], 0.1) == pytest.approx(
            math.exp(1.1 * 2.0))

    def test_proxy_calE(self):
        lad = build_ladder(4, 0.1, 0.4)
        assert proxy_calE(lad) == pytest.approx(16.0 ** (2 / math.pi * 1.1))


class TestScalingFit:
    def test_exact_power_law(self):
        nus = np.array([1e-4, 1e-5, 1e-6, 1e-7])
        vals = 3.0 * nus ** 0.73
        assert scaling_fit(nus, vals) == pytest.approx(0.73, abs=1e-12)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamples):
            scaling_fit([1e-4, 1e-5], [1.0, 0.1])

    def test_narrow_span(self):
        with pytest.raises(InsufficientSamples):
            scaling_fit([1e-4, 1.5e-4, 2e-4], [1.0, 1.5, 2.0])

    def test_nonpositive_values(self):
        with pytest.raises(InsufficientSamples):
            scaling_fit([1e-4, 1e-5, 1e-6], [1.0, 0.0, 0.1])
