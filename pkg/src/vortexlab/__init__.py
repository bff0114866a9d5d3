"""vortexlab: desk-scale laboratory for 2+1/2-dimensional vortex
stretching and inviscid-limit dissipation scalings."""

from .errors import VortexLabError
from .spectral import (TorusGrid, ScalarField2D, VectorField2D,
                       velocity_from_vorticity, gradient, sample_at,
                       dealias, lp_norm)
from .params import (ParameterLadder, build_ladder, build_large_scale,
                     build_small_scale, measure_initial_norms)
from .evolve import (FlowState, StepConfig, step, run_to,
                     DiagnosticsRecord, measure, energy_balance_residual)
from .velgrad import (GradSample, BoundCheck, grad_at, pv_oracle,
                      check_local_bounds, check_global_bounds,
                      vorticity_gradient_growth, second_gradient_bound)
from .tracers import (TracerEnsemble, standard_seeds, advance,
                      check_yudovich, check_lld, cauchy_check)
from .gaps import (GapRecord, BoundEnvelope, paired_run, envelope_eval,
                   measured_calE, scaling_fit)
from .harness import SweepResult, choose_resolution, run_one, sweep, estimate_b0

__version__ = "0.1.0"
