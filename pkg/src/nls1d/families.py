"""Named initial-data families used by the driver and the test suite."""

from __future__ import annotations

import math

import numpy as np

from nls1d.grid import Grid, GridFunction, _smooth_step

WINDOW_PLATEAU = 0.7


def bump_window(grid: Grid) -> np.ndarray:
    """Smooth compactly supported cutoff, 1 on the inner 70% of the domain.

    Identical to the truncated-line spectral window, but usable on any
    topology to manufacture decayed ("windowed") data.
    """
    center = grid.x_min + 0.5 * grid.length
    r = np.abs(grid.x - center) / (0.5 * grid.length)
    return np.where(r <= WINDOW_PLATEAU, 1.0,
                    _smooth_step((1.0 - r) / (1.0 - WINDOW_PLATEAU)))


def _center(grid: Grid, center: float | None) -> float:
    return grid.x_min + 0.5 * grid.length if center is None else center


def gaussian(grid: Grid, amplitude: float = 1.0, sigma: float = 1.0,
             center: float | None = None) -> GridFunction:
    """A exp(-(x - c)^2 / sigma^2), centered in the domain by default."""
    c = _center(grid, center)
    return GridFunction(grid, amplitude * np.exp(-((grid.x - c) / sigma) ** 2))


def windowed_gaussian(grid: Grid, amplitude: float = 1.0, sigma: float = 1.0,
                      center: float | None = None) -> GridFunction:
    """Gaussian times the smooth cutoff: compactly supported Schwartz-type data."""
    g = gaussian(grid, amplitude, sigma, center)
    return GridFunction(grid, g.values * bump_window(grid))


def plane_wave(grid: Grid, amplitude: float, k: float) -> GridFunction:
    """A e^{ikx}; k must sit on the grid's wavenumber lattice."""
    spacing = 2.0 * np.pi / grid.length
    mode = round(k / spacing)
    if abs(k - mode * spacing) > 1e-9 * max(abs(k), spacing):
        raise ValueError(f"k={k} is not a lattice wavenumber (spacing {spacing})")
    return GridFunction(grid, amplitude * np.exp(1j * k * grid.x))


def windowed_power(grid: Grid, alpha: float, trig: bool = True) -> GridFunction:
    """(1 + x^2)^(-alpha) times cos(x) + cos(sqrt(2) x), smoothly windowed.

    The slowly decaying tails make the window essential; alpha must be
    positive for the profile to be representable on a finite grid at all.
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be positive (non-decaying data is not representable)")
    c = _center(grid, None)
    xc = grid.x - c
    prof = (1.0 + xc ** 2) ** (-alpha)
    if trig:
        prof = prof * (np.cos(xc) + np.cos(math.sqrt(2.0) * xc))
    return GridFunction(grid, prof * bump_window(grid))
