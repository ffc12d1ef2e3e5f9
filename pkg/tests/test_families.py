import numpy as np
import pytest

from nls1d.families import (
    bump_window,
    gaussian,
    plane_wave,
    windowed_gaussian,
    windowed_power,
)
from nls1d.grid import Grid


def grid(n=256, length=40.0, topology="periodic"):
    return Grid(-length / 2, length / n, n, topology)


class TestFamilies:
    def test_gaussian_shape(self):
        g = grid()
        f = gaussian(g, amplitude=2.0, sigma=1.0)
        assert np.max(np.abs(f.values)) == pytest.approx(2.0, rel=1e-6)
        i = np.argmin(np.abs(g.x - 1.0))
        assert abs(f.values[i]) == pytest.approx(2.0 * np.exp(-g.x[i] ** 2), rel=1e-12)

    def test_windowed_gaussian_vanishes_at_edges(self):
        g = grid()
        f = windowed_gaussian(g, sigma=12.0)
        assert abs(f.values[0]) < 1e-12
        assert abs(f.values[-1]) < 1e-8

    def test_plane_wave_on_lattice(self):
        g = grid(length=2 * np.pi * 5)
        k = 2 * np.pi * 3 / g.length
        f = plane_wave(g, 0.5, k)
        assert np.allclose(np.abs(f.values), 0.5)

    def test_plane_wave_off_lattice_rejected(self):
        g = grid(length=2 * np.pi * 5)
        with pytest.raises(ValueError):
            plane_wave(g, 0.5, 0.37)

    def test_windowed_power_requires_positive_alpha(self):
        g = grid()
        with pytest.raises(ValueError):
            windowed_power(g, 0.0)

    def test_windowed_power_profile(self):
        g = grid()
        f = windowed_power(g, 1.0, trig=False)
        mid = g.n_points // 2
        assert abs(f.values[mid]) == pytest.approx(
            (1 + g.x[mid] ** 2) ** -1.0, rel=1e-9)
        assert abs(f.values[0]) < 1e-12

    def test_window_plateau(self):
        g = grid()
        w = bump_window(g)
        inner = np.abs(g.x) <= 0.69 * 20.0
        assert np.all(w[inner] == 1.0)
