"""Uniform 1D grids, Lebesgue/Sobolev norms, derivatives, and rescaling.

Two topologies are supported.  ``periodic`` grids cover one cell [x_min,
x_min + L) with L = n_points * dx and use exact Fourier calculus.
``truncated`` grids stand in for the whole line: the stored samples are
used as-is for pointwise quantities, derivatives fall back to centered
finite differences with zero extension beyond the edges, and any operation
that goes through the FFT first multiplies by a smooth compactly supported
window (plateau on the inner 70% of the domain) so the implied periodic
extension is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nls1d import kernels
from nls1d.errors import (
    GridMismatchError,
    InvalidExponentError,
    InvalidOrderError,
    InvalidScaleError,
    TopologyError,
    UndefinedAtZeroModeError,
)

PERIODIC = "periodic"
TRUNCATED = "truncated"

# inner fraction of the domain on which the truncated-line window equals 1
WINDOW_PLATEAU = 0.7


def _smooth_step(s):
    """C-infinity transition from 0 at s<=0 to 1 at s>=1."""
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0.0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        b = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Grid:
    """Uniform spatial grid; n_points must be a power of two (FFT backend)."""

    x_min: float
    dx: float
    n_points: int
    topology: str = PERIODIC

    def __post_init__(self):
        if self.dx <= 0.0 or not math.isfinite(self.dx):
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 8, got {n!r}")
        if self.topology not in (PERIODIC, TRUNCATED):
            raise TopologyError(f"unknown topology {self.topology!r}")
        if not math.isfinite(self.x_min):
            raise ValueError("x_min must be finite")

    @property
    def length(self) -> float:
        return self.n_points * self.dx

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n_points)
        x.flags.writeable = False
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers (2 pi / L) * {0, 1, ..., n/2-1, -n/2, ..., -1}."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        k.flags.writeable = False
        return k

    @cached_property
    def window(self) -> np.ndarray:
        """Smooth cutoff applied before spectral operations on truncated grids."""
        if self.topology == PERIODIC:
            w = np.ones(self.n_points)
        else:
            center = self.x_min + 0.5 * self.length
            r = np.abs(self.x - center) / (0.5 * self.length)
            w = np.where(r <= WINDOW_PLATEAU, 1.0,
                         _smooth_step((1.0 - r) / (1.0 - WINDOW_PLATEAU)))
        w.flags.writeable = False
        return w

    def compatible(self, other: "Grid", rtol: float = 1e-9) -> bool:
        return (
            self.n_points == other.n_points
            and self.topology == other.topology
            and math.isclose(self.dx, other.dx, rel_tol=rtol)
            and math.isclose(self.x_min, other.x_min, rel_tol=rtol,
                             abs_tol=rtol * self.length)
        )


def require_same_grid(a: "GridFunction", b: "GridFunction") -> None:
    if not a.grid.compatible(b.grid):
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a grid.  Values are copied and locked on creation."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {v.shape} does not match grid size {self.grid.n_points}")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("grid function contains non-finite entries")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def windowed_values(self) -> np.ndarray:
        """Samples ready for the FFT: windowed on truncated grids."""
        if self.grid.topology == PERIODIC:
            return self.values
        return self.values * self.grid.window

    def __add__(self, other: "GridFunction") -> "GridFunction":
        require_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        require_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "GridFunction":
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, np.conj(self.values))


@dataclass(frozen=True)
class SobolevSpec:
    """Number of derivatives and the Lebesgue exponent of a layered norm."""

    order: int
    p: float

    def __post_init__(self):
        if not isinstance(self.order, (int, np.integer)) or self.order < 0:
            raise InvalidOrderError(f"order must be an integer >= 0, got {self.order!r}")
        if not self.p >= 1.0:
            raise InvalidExponentError(f"exponent must be >= 1, got {self.p}")


def lp_norm(f: GridFunction, p: float) -> float:
    """Riemann-sum L^p norm; max of samples when p = inf."""
    if not p >= 1.0:
        raise InvalidExponentError(f"exponent must be >= 1, got {p}")
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))
    a2 = kernels.abs2(f.values)
    if p == 2.0:
        return float(math.sqrt(np.sum(a2) * f.grid.dx))
    return float((np.sum(a2 ** (p / 2.0)) * f.grid.dx) ** (1.0 / p))


def _fd4_once(values: np.ndarray, dx: float) -> np.ndarray:
    """4th-order centered first derivative, zero extension beyond the edges."""
    p = np.zeros(len(values) + 4, dtype=np.complex128)
    p[2:-2] = values
    return (-p[4:] + 8.0 * p[3:-1] - 8.0 * p[1:-3] + p[:-4]) / (12.0 * dx)


def differentiate(f: GridFunction, m: int = 1) -> GridFunction:
    """m-th spatial derivative.

    Periodic grids use the exact Fourier multiplier (ik)^m; truncated grids
    apply the 4th-order centered stencil m times, treating the function as
    zero beyond the grid (its values there are assumed decayed).
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidOrderError(f"derivative order must be an integer >= 1, got {m!r}")
    if f.grid.topology == PERIODIC:
        hat = np.fft.fft(f.values)
        hat *= (1j * f.grid.wavenumbers) ** m
        return GridFunction(f.grid, np.fft.ifft(hat))
    v = f.values
    for _ in range(m):
        v = _fd4_once(v, f.grid.dx)
    return GridFunction(f.grid, v)


def sobolev_norm(f: GridFunction, spec: SobolevSpec) -> float:
    """Layered norm: sum over j <= order of the L^p norm of the j-th derivative."""
    total = lp_norm(f, spec.p)
    for j in range(1, spec.order + 1):
        total += lp_norm(differentiate(f, j), spec.p)
    return total


def homogeneous_hs_norm(f: GridFunction, s: float) -> float:
    """Homogeneous H^s norm via the mode sum, weighted so s = 0 equals the L2 norm.

    For s < 0 the k = 0 mode is dropped (the multiplier is singular there);
    the returned value is the nonzero-mode norm.  Mean-dominated data, where
    the dropped mode carries at least half the L2 mass, is rejected because
    the nonzero-mode norm says nothing about it.
    """
    if f.grid.topology != PERIODIC:
        raise TopologyError("homogeneous H^s norm requires a periodic grid")
    if not -1.0 <= s <= 3.0:
        raise ValueError(f"order s must lie in [-1, 3], got {s}")
    hat = np.fft.fft(f.values)
    weight = f.grid.dx / f.grid.n_points
    k = f.grid.wavenumbers
    power = kernels.abs2(hat)
    if s < 0.0:
        total = np.sum(power)
        if total > 0.0 and power[0] >= 0.5 * total:
            raise UndefinedAtZeroModeError(
                "negative-order norm undefined for mean-dominated data")
        mult = np.zeros_like(k)
        nz = k != 0.0
        mult[nz] = np.abs(k[nz]) ** (2.0 * s)
    else:
        mult = np.abs(k) ** (2.0 * s)  # 0**0 == 1 covers s == 0
    return float(math.sqrt(np.sum(mult * power) * weight))


def scale_data(f: GridFunction, lam: float) -> GridFunction:
    """Scaling map f(x) -> lam * f(lam x), realized exactly.

    The result is sampled on the grid with spacing dx/lam and the same point
    count (domain shrunk by lam), where the new samples are just lam times
    the old ones; no interpolation is needed and the scaling identities hold
    to roundoff.
    """
    if not lam > 0.0 or not math.isfinite(lam):
        raise InvalidScaleError(f"scale factor must be positive, got {lam}")
    if lam == 1.0:
        return GridFunction(f.grid, f.values)
    g = Grid(f.grid.x_min / lam, f.grid.dx / lam, f.grid.n_points, f.grid.topology)
    return GridFunction(g, lam * f.values)
