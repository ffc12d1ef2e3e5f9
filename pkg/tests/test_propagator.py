import math

import numpy as np
import pytest

from nls1d.errors import (
    OutOfLemmaRangeError,
    TimeTooSmallError,
    TopologyError,
    UndefinedRatioError,
)
from nls1d.grid import Grid, GridFunction
from nls1d.propagator import (
    PropagatorBackend,
    default_cutoff_radius,
    dispersive_ratio,
    free_evolve,
    unitarity_check,
)


def periodic_grid(n=128, length=2 * np.pi, x_min=0.0):
    return Grid(x_min, length / n, n, "periodic")


def truncated_grid(n=1024, length=120.0):
    return Grid(-length / 2, length / n, n, "truncated")


def gaussian(grid, width2=1.0):
    return GridFunction(grid, np.exp(-grid.x ** 2 / width2))


def evolved_gaussian(x, t):
    # closed form for data exp(-x^2): width parameter a = 1 in
    # u(t, x) = (1 + 4iat)^(-1/2) exp(-a x^2 / (1 + 4iat))
    w = 1.0 + 4.0j * t
    return np.exp(-x ** 2 / w) / np.sqrt(w)


class TestFourierBackend:
    def test_time_zero_identity_on_samples(self):
        g = periodic_grid()
        f = GridFunction(g, np.exp(np.sin(g.x)) + 0.2j * np.cos(g.x))
        out = free_evolve(f, 0.0)
        assert np.array_equal(out.values, f.values)

    def test_mode_eigenfunction(self):
        g = periodic_grid(n=64)
        k = 2 * np.pi * 3 / g.length
        f = GridFunction(g, np.exp(1j * k * g.x))
        t = 0.37
        out = free_evolve(f, t)
        assert np.allclose(out.values, np.exp(-1j * k * k * t) * f.values, rtol=1e-12)

    def test_gaussian_closed_form(self):
        g = Grid(-32.0, 64.0 / 2048, 2048, "periodic")
        f = gaussian(g)
        t = 0.5
        out = free_evolve(f, t)
        exact = evolved_gaussian(g.x, t)
        err = np.max(np.abs(out.values - exact)) / np.max(np.abs(exact))
        assert err < 1e-8

    def test_group_property(self):
        g = periodic_grid(n=256, length=16.0, x_min=-8.0)
        f = gaussian(g)
        s, t = 0.21, 0.47
        two_step = free_evolve(free_evolve(f, s), t)
        one_step = free_evolve(f, s + t)
        scale = np.max(np.abs(one_step.values))
        assert np.max(np.abs(two_step.values - one_step.values)) < 1e-10 * scale

    def test_unitarity(self):
        g = periodic_grid(n=256, length=16.0, x_min=-8.0)
        assert unitarity_check(gaussian(g), 1.0) < 1e-12
        rng = np.random.default_rng(5)
        f = GridFunction(g, rng.standard_normal(256) + 1j * rng.standard_normal(256))
        assert unitarity_check(f, 0.3) < 1e-12

    def test_unitarity_rejects_zero(self):
        g = periodic_grid()
        with pytest.raises(UndefinedRatioError):
            unitarity_check(GridFunction(g, np.zeros(g.n_points)), 1.0)


class TestKernelBackend:
    def test_requires_truncated_topology(self):
        g = periodic_grid()
        with pytest.raises(TopologyError):
            free_evolve(gaussian(g), 0.5, PropagatorBackend("kernel"))

    def test_time_floor(self):
        g = truncated_grid()
        with pytest.raises(TimeTooSmallError):
            free_evolve(gaussian(g), 1e-4, PropagatorBackend("kernel"))

    def test_matches_multiplier_on_gaussian(self):
        g = truncated_grid(n=1024, length=120.0)
        f = gaussian(g)
        t = 0.5
        ref = free_evolve(f, t)
        out = free_evolve(f, t, PropagatorBackend("kernel", cutoff_radius=45.0,
                                                  nodes_per_oscillation=12))
        err = np.max(np.abs(out.values - ref.values)) / np.max(np.abs(ref.values))
        assert err < 1e-10

    @pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
    def test_quadrature_refinement_shrinks_error(self, t):
        # default radius grows with q; each doubling gains well over 4x
        g = truncated_grid(n=1024, length=120.0)
        f = gaussian(g)
        ref = free_evolve(f, t).values
        scale = np.max(np.abs(ref))
        errs = []
        for q in (8, 16):
            out = free_evolve(f, t, PropagatorBackend("kernel", nodes_per_oscillation=q))
            errs.append(np.max(np.abs(out.values - ref)) / scale)
        assert errs[1] < errs[0] / 4 or errs[1] < 1e-11

    def test_unitarity_defect_small_but_nonzero(self):
        g = truncated_grid(n=1024, length=120.0)
        f = gaussian(g)
        coarse = unitarity_check(f, 0.5, PropagatorBackend("kernel",
                                                           nodes_per_oscillation=8))
        fine = unitarity_check(f, 0.5, PropagatorBackend("kernel",
                                                         nodes_per_oscillation=16))
        assert coarse > 0.0
        assert fine <= coarse

    def test_default_radius_follows_time_and_density(self):
        assert default_cutoff_radius(0.5, 8) == pytest.approx(16.0, rel=1e-12)
        assert default_cutoff_radius(1.0, 32) > default_cutoff_radius(1.0, 8)


class TestDispersiveRatio:
    def test_t_zero_below_one(self):
        g = truncated_grid(n=512, length=60.0)
        f = gaussian(g)
        for p in (2.0, 6.0, math.inf):
            assert dispersive_ratio(f, 0.0, p) <= 1.0 + 1e-9

    def test_scale_invariance_in_amplitude(self):
        g = truncated_grid(n=512, length=60.0)
        f = gaussian(g)
        r1 = dispersive_ratio(f, 0.6, 6.0)
        r2 = dispersive_ratio((0.3 - 2.2j) * f, 0.6, 6.0)
        assert r2 == pytest.approx(r1, rel=1e-12)

    def test_out_of_range_exponent(self):
        g = truncated_grid()
        with pytest.raises(OutOfLemmaRangeError):
            dispersive_ratio(gaussian(g), 0.5, 1.5)

    def test_zero_data(self):
        g = truncated_grid()
        with pytest.raises(UndefinedRatioError):
            dispersive_ratio(GridFunction(g, np.zeros(g.n_points)), 0.5, 2.0)

    def test_sup_stable_under_grid_doubling(self):
        times = np.linspace(0.0, 1.0, 21)
        sups = []
        for n in (512, 1024):
            g = truncated_grid(n=n, length=80.0)
            f = gaussian(g)
            sups.append(max(dispersive_ratio(f, t, math.inf) for t in times))
        assert abs(sups[1] - sups[0]) / sups[0] < 0.05

    def test_windowed_inverse_square_golden(self):
        # frozen from the first converged run (n=512, L=80, 21 times)
        from nls1d.families import bump_window

        g = truncated_grid(n=512, length=80.0)
        f = GridFunction(g, (1.0 + g.x ** 2) ** -1.0 * bump_window(g))
        times = np.linspace(0.0, 1.0, 21)
        sup = max(dispersive_ratio(f, t, 6.0) for t in times)
        assert sup == pytest.approx(0.29741, rel=2e-2)

    def test_sup_monotone_in_band_limit(self):
        # low-pass family of one bump: loosening the cut never raises the sup
        # (measured direction: the || f'' || part of the denominator grows
        # faster with added high modes than the evolved numerator does)
        g = truncated_grid(n=1024, length=80.0)
        base = np.exp(-g.x ** 2)
        hat = np.fft.fft(base)
        k = g.wavenumbers
        times = np.linspace(0.0, 1.0, 11)
        sups = []
        for cut in (2.0, 3.0, 4.0, 6.0):
            f = GridFunction(g, np.fft.ifft(np.where(np.abs(k) <= cut, hat, 0.0)))
            sups.append(max(dispersive_ratio(f, t, math.inf) for t in times))
        for wider, tighter in zip(sups[1:], sups[:-1]):
            assert wider <= tighter * (1 + 1e-9)
