"""Exception types shared across the package."""


class VortexLabError(Exception):
    """Base class for all errors raised by this package."""


class NonFinite(VortexLabError):
    """Input field contains NaN or Inf samples."""


class NonZeroMean(VortexLabError):
    """Vorticity mean exceeds tolerance; Poisson inversion is ill-posed."""


class UnsupportedRange(VortexLabError):
    """Parameter outside the supported range."""


class DegenerateLadder(VortexLabError):
    """Computed small-scale length violates the local-gradient lemma condition."""


class ResolutionTooCoarse(VortexLabError):
    """Grid spacing too large to resolve the requested structure."""


class ResolutionInfeasible(VortexLabError):
    """No admissible grid up to the configured maximum resolution."""


class CflViolation(VortexLabError):
    """Time step exceeds the advective CFL limit."""


class BlowupDetected(VortexLabError):
    """A norm exceeded 1e6x its initial value (numerical instability)."""


class InsufficientSamples(VortexLabError):
    """Not enough records/viscosities for the requested estimate."""


class TooCloseToSingularity(VortexLabError):
    """Quadrature point too close to a vorticity discontinuity."""


class OutsideRegion(VortexLabError):
    """Requested sample point lies outside the small-ball region."""


class SeedOutsideRegion(VortexLabError):
    """Tracer seed lies outside the inner tracer region."""


class StageUnavailable(VortexLabError):
    """Field provider cannot supply a required stage time."""


class ViscousRun(VortexLabError):
    """Operation only valid for inviscid (nu = 0) runs."""


class MissingNorms(VortexLabError):
    """Initial-data norms required for an envelope are unavailable."""
