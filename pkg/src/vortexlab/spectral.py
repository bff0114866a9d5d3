"""Pseudo-spectral machinery on the periodic square [-L, L)^2.

Conventions (fixed for reproducibility of stored spectral caches):
  * nodes x_j = -L + 2L*j/N along each axis, axis 0 is x1, axis 1 is x2;
  * wavenumbers are integer multiples of pi/L (period 2L per axis);
  * real-to-complex transforms via numpy.fft.rfft2, inverse carries the
    1/N^2 normalization (numpy default).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .errors import NonFinite, NonZeroMean

__all__ = [
    "TorusGrid",
    "ScalarField2D",
    "VectorField2D",
    "velocity_from_vorticity",
    "gradient",
    "sample_at",
    "dealias",
    "lp_norm",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform N x N grid on the torus (R / 2L Z)^2."""

    half_period: float
    resolution: int

    def __post_init__(self):
        if self.half_period <= 0:
            raise ValueError("half_period must be positive")
        if self.resolution < 16 or self.resolution % 2 != 0:
            raise ValueError("resolution must be even and >= 16")

    @property
    def h(self) -> float:
        return 2.0 * self.half_period / self.resolution

    def nodes(self) -> np.ndarray:
        N, L = self.resolution, self.half_period
        return -L + 2.0 * L * np.arange(N) / N

    def meshes(self):
        x = self.nodes()
        return np.meshgrid(x, x, indexing="ij")

    def wavenumbers(self):
        """(k1, k2) broadcastable over the rfft2 layout."""
        return _wavenumbers(self.half_period, self.resolution)

    def k_squared(self) -> np.ndarray:
        k1, k2 = self.wavenumbers()
        return k1**2 + k2**2

    def dealias_mask(self) -> np.ndarray:
        return _dealias_mask(self.resolution)


@lru_cache(maxsize=32)
def _wavenumbers(L: float, N: int):
    scale = np.pi / L
    m1 = np.fft.fftfreq(N, d=1.0 / N)
    m2 = np.fft.rfftfreq(N, d=1.0 / N)
    return scale * m1[:, None], scale * m2[None, :]


@lru_cache(maxsize=32)
def _dealias_mask(N: int):
    # 2/3 rule applied per axis: keep |m| <= N/3.
    cut = N // 3
    m1 = np.abs(np.fft.fftfreq(N, d=1.0 / N))
    m2 = np.abs(np.fft.rfftfreq(N, d=1.0 / N))
    return (m1[:, None] <= cut) & (m2[None, :] <= cut)


class ScalarField2D:
    """Real scalar samples on a TorusGrid with a lazily cached transform."""

    __slots__ = ("grid", "values", "_hat")

    def __init__(self, grid: TorusGrid, values: np.ndarray, hat: np.ndarray | None = None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.resolution, grid.resolution):
            raise ValueError("values shape does not match grid")
        self.grid = grid
        self.values = values
        self._hat = hat

    @classmethod
    def from_hat(cls, grid: TorusGrid, hat: np.ndarray) -> "ScalarField2D":
        N = grid.resolution
        values = np.fft.irfft2(hat, s=(N, N))
        return cls(grid, values, hat=hat.copy())

    @property
    def hat(self) -> np.ndarray:
        if self._hat is None:
            self._hat = np.fft.rfft2(self.values)
        return self._hat

    def check_finite(self, name: str = "field"):
        if not np.all(np.isfinite(self.values)):
            raise NonFinite(f"{name} contains non-finite samples")

    def copy(self) -> "ScalarField2D":
        return ScalarField2D(self.grid, self.values.copy(),
                             None if self._hat is None else self._hat.copy())


@dataclass(frozen=True)
class VectorField2D:
    u1: ScalarField2D
    u2: ScalarField2D

    @property
    def grid(self) -> TorusGrid:
        return self.u1.grid


def velocity_from_vorticity(omega: ScalarField2D) -> VectorField2D:
    """Recover u = perp-grad of the inverse Laplacian of omega (zero mean).

    Raises NonZeroMean when |mean| > 1e-10 * max|omega|; smaller means are
    projected out silently (mollification leaves 1e-15-level means behind).
    """
    omega.check_finite("omega")
    grid = omega.grid
    amax = np.max(np.abs(omega.values))
    mean = float(np.mean(omega.values))
    if amax > 0 and abs(mean) > 1e-10 * amax:
        raise NonZeroMean(f"vorticity mean {mean:g} exceeds tolerance")
    k1, k2 = grid.wavenumbers()
    k2sq = grid.k_squared()
    inv = np.zeros_like(k2sq)
    np.divide(1.0, k2sq, out=inv, where=k2sq > 0)
    psi_hat = -omega.hat * inv          # Laplace(psi) = omega, zero mode dropped
    u1_hat = -1j * k2 * psi_hat
    u2_hat = 1j * k1 * psi_hat
    return VectorField2D(ScalarField2D.from_hat(grid, u1_hat),
                         ScalarField2D.from_hat(grid, u2_hat))


def gradient(f: ScalarField2D) -> VectorField2D:
    """Spectral gradient of the trigonometric interpolant."""
    f.check_finite()
    k1, k2 = f.grid.wavenumbers()
    return VectorField2D(ScalarField2D.from_hat(f.grid, 1j * k1 * f.hat),
                         ScalarField2D.from_hat(f.grid, 1j * k2 * f.hat))


def dealias(f_hat: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Zero every mode above 2/3 of the Nyquist wavenumber (per axis)."""
    return f_hat * grid.dealias_mask()


def lp_norm(f: ScalarField2D, p) -> float:
    """Discrete L^p norm: node quadrature with cell area h^2; sup for p=inf."""
    f.check_finite()
    h2 = f.grid.h**2
    if p == 1:
        return float(h2 * np.sum(np.abs(f.values)))
    if p == 2:
        return float(np.sqrt(h2 * np.sum(f.values**2)))
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(f.values)))
    raise ValueError("p must be 1, 2 or inf")


def _wrap_indices(grid: TorusGrid, points: np.ndarray) -> np.ndarray:
    # fractional grid indices of physical points, periodic wrap
    return np.mod((points + grid.half_period) / grid.h, grid.resolution)


def spline_coefficients(values: np.ndarray) -> np.ndarray:
    """Precomputed periodic cubic-spline coefficients for sample_many."""
    return ndimage.spline_filter(values, order=3, mode="grid-wrap")


def sample_many(f: ScalarField2D, points: np.ndarray, method: str = "bicubic",
                coeffs: np.ndarray | None = None) -> np.ndarray:
    """Evaluate f at an array of points, shape (k, 2).

    method='bicubic' uses a periodic interpolating cubic spline (exact at
    nodes); method='trig' evaluates the trigonometric interpolant directly
    (spectrally accurate, O(N^2) per point).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if method == "bicubic":
        if coeffs is None:
            coeffs = spline_coefficients(f.values)
        idx = _wrap_indices(f.grid, points)
        return ndimage.map_coordinates(coeffs, idx.T, order=3,
                                       mode="grid-wrap", prefilter=False)
    if method == "trig":
        return np.array([_trig_eval(f, p) for p in points])
    raise ValueError("method must be 'bicubic' or 'trig'")


def sample_at(f: ScalarField2D, point, method: str = "trig") -> float:
    """Interpolated value of f at one (x1, x2) point (reduced mod the torus)."""
    f.check_finite()
    return float(sample_many(f, np.asarray(point, dtype=float)[None, :], method)[0])


def _trig_eval(f: ScalarField2D, point: np.ndarray) -> float:
    # Re of the naive fftfreq-convention sum symmetrizes the Nyquist lines,
    # i.e. yields the real (cosine-convention) trigonometric interpolant.
    N = f.grid.resolution
    L = f.grid.half_period
    fh = np.fft.fft2(f.values)
    m = np.fft.fftfreq(N, d=1.0 / N)
    theta1 = np.pi * (point[0] + L) / L
    theta2 = np.pi * (point[1] + L) / L
    e1 = np.exp(1j * m * theta1)
    e2 = np.exp(1j * m * theta2)
    return float(np.real(e1 @ fh @ e2) / N**2)


def reflect1(values: np.ndarray) -> np.ndarray:
    """Samples of f(-x1, x2) on the node lattice."""
    return np.roll(values[::-1, :], 1, axis=0)


def reflect2(values: np.ndarray) -> np.ndarray:
    """Samples of f(x1, -x2) on the node lattice."""
    return np.roll(values[:, ::-1], 1, axis=1)


def antisymmetrize_odd_odd(values: np.ndarray) -> np.ndarray:
    """Project onto the odd-odd symmetry class on the node lattice."""
    a = values - reflect1(values)
    a = a - reflect2(a)
    return 0.25 * a
