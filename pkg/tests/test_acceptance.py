"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL
report lines.
"""

import math
import time

import numpy as np

from nls1d import diagnostics
from nls1d.families import gaussian, plane_wave, windowed_gaussian, windowed_power
from nls1d.grid import Grid, SobolevSpec, scale_data
from nls1d.picard import (
    SolverConfig,
    TimeGrid,
    normalize_to_smallness,
    picard_iterates,
    rescale_to_smallness,
    s0_norm,
    solve_nls,
)
from nls1d.propagator import PropagatorBackend, dispersive_ratio, free_evolve
from nls1d.reference import OracleConfig, compare, integrate_direct


def report(index, name, ok, detail):
    print(f"\nACCEPTANCE {index:2d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {index} ({name}): {detail}"


def fit_slope(xs, ys):
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def test_criterion_01_plane_wave_exactness():
    start = time.perf_counter()
    g = Grid(0.0, 2 * np.pi / 256, 256, "periodic")
    amp, k = 0.5, 2.0
    u0 = plane_wave(g, amp, k)
    tg = TimeGrid(0.0, 1e-3, 1000)
    exact = amp * np.exp(1j * (k * g.x[None, :]
                               - (k * k + amp * amp) * tg.times[:, None]))

    oracle = integrate_direct(u0, 1.0, OracleConfig(dt=1e-3))
    err_oracle = np.max(np.abs(oracle.values - exact)) / amp

    u, _ = solve_nls(u0, 1, tg, SolverConfig(tol=1e-7, max_iter=150))
    err_picard = np.max(np.abs(u.values - exact)) / amp

    elapsed = time.perf_counter() - start
    ok = err_oracle < 1e-6 and err_picard < 1e-4 and elapsed < 10.0
    report(1, "plane-wave exactness", ok,
           f"oracle {err_oracle:.2e} < 1e-6, picard {err_picard:.2e} < 1e-4, "
           f"runtime {elapsed:.1f}s < 10s")


def test_criterion_02_oracle_conservation():
    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    u0 = gaussian(g, amplitude=0.75)
    traj = integrate_direct(u0, 1.0, OracleConfig(dt=1e-3))
    m = np.array([diagnostics.mass(traj.node(i)) for i in range(0, traj.n_nodes, 50)])
    e = np.array([diagnostics.energy(traj.node(i)) for i in range(0, traj.n_nodes, 50)])
    mass_drift = np.max(np.abs(m - m[0])) / m[0]
    energy_drift = np.max(np.abs(e - e[0])) / e[0]
    ok = mass_drift < 1e-10 and energy_drift < 1e-6
    report(2, "oracle conservation", ok,
           f"mass drift {mass_drift:.2e} < 1e-10, energy drift {energy_drift:.2e} < 1e-6")


def test_criterion_03_oracle_equivalence():
    start = time.perf_counter()
    g = Grid(-16.0, 32.0 / 512, 512, "periodic")
    base = windowed_gaussian(g)
    details = []
    ok = True
    for depth in (1, 2):
        spec = SobolevSpec(2 * depth + 1, 4.0 * depth + 2.0)
        data, _ = rescale_to_smallness(base, spec, 0.1)
        tg = TimeGrid(0.0, 1e-3, 1000)
        u, _ = solve_nls(data, depth, tg, SolverConfig(tol=1e-10, max_iter=80))
        ref = integrate_direct(data, 1.0, OracleConfig(dt=1e-3))
        linf = compare(u, ref).linf
        ok = ok and linf < 1e-4
        details.append(f"n={depth}: linf {linf:.2e} < 1e-4")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120.0
    report(3, "oracle equivalence", ok,
           "; ".join(details) + f"; runtime {elapsed:.1f}s < 120s")


def test_criterion_04_remainder_exponent():
    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    base = windowed_gaussian(g)
    eps_values = [0.05, 0.1, 0.2]
    details = []
    ok = True
    for depth in (1, 2):
        spec = SobolevSpec(2 * depth + 1, 4.0 * depth + 2.0)
        s0 = []
        for eps in eps_values:
            data = normalize_to_smallness(base, spec, eps)
            tg = TimeGrid(0.0, 0.02, 50)
            _, dec = solve_nls(data, depth, tg, SolverConfig(tol=1e-13, max_iter=80))
            s0.append(s0_norm(dec.remainder))
        slope = fit_slope(eps_values, s0)
        target = 2 * depth + 1
        ok = ok and abs(slope - target) < 0.5
        details.append(f"n={depth}: slope {slope:.2f} = {target} +- 0.5")
    report(4, "remainder exponent", ok, "; ".join(details))


def test_criterion_05_iterate_exponents():
    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    base = windowed_gaussian(g)
    spec = SobolevSpec(7, 14.0)
    eps_values = [0.05, 0.1, 0.2]
    levels = {j: [] for j in range(3)}
    for eps in eps_values:
        data = normalize_to_smallness(base, spec, eps)
        dec = picard_iterates(data, 3, TimeGrid(0.0, 0.02, 50))
        for j in range(3):
            levels[j].append(dec.level_norms[j])
    details = []
    ok = True
    for j in range(3):
        slope = fit_slope(eps_values, levels[j])
        target = 2 * j + 1
        ok = ok and abs(slope - target) < 0.3
        details.append(f"j={j}: slope {slope:.2f} = {target} +- 0.3")
    report(5, "iterate exponents", ok, "; ".join(details))


def test_criterion_06_dispersive_bound():
    times = np.linspace(0.0, 1.0, 21)
    exponents = [2.0, 6.0, math.inf]

    def families_on(n):
        g = Grid(-40.0, 80.0 / n, n, "truncated")
        return {"gaussian": gaussian(g), "windowed-power": windowed_power(g, 1.0)}

    ok = True
    details = []
    sups = {}
    for n in (512, 1024):
        for name, f in families_on(n).items():
            for p in exponents:
                sups[(name, p, n)] = max(dispersive_ratio(f, t, p) for t in times)
    for name, f in families_on(512).items():
        r0 = dispersive_ratio(f, 0.0, 2.0)
        ok = ok and r0 <= 1.0 + 1e-9
        for p in exponents:
            coarse, fine = sups[(name, p, 512)], sups[(name, p, 1024)]
            change = abs(fine - coarse) / coarse
            ok = ok and math.isfinite(coarse) and change < 0.05
            details.append(f"{name} p={p}: sup {coarse:.3f}, doubling change {change:.1%}")
    report(6, "dispersive bound", ok, "; ".join(details))


def test_criterion_07_scaling_commutation():
    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    data, _ = rescale_to_smallness(windowed_gaussian(g), SobolevSpec(3, 6.0), 0.3)
    lam = 2.0
    cfg = SolverConfig(tol=1e-11, max_iter=80)
    u_coarse, _ = solve_nls(data, 1, TimeGrid(0.0, 4e-3, 250), cfg)
    u_scaled, _ = solve_nls(scale_data(data, lam), 1, TimeGrid(0.0, 1e-3, 250), cfg)
    expected = lam * u_coarse.values  # node m of the base run is time lam^2 t_m
    err = np.max(np.abs(u_scaled.values - expected)) / np.max(np.abs(expected))
    ok = err < 1e-4
    report(7, "scaling commutation", ok, f"relative error {err:.2e} < 1e-4")


def test_criterion_08_gronwall():
    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    data, _ = rescale_to_smallness(windowed_gaussian(g), SobolevSpec(3, 6.0), 0.2)
    tg = TimeGrid(0.0, 2e-3, 1000)  # [0, 2]
    _, dec = solve_nls(data, 1, tg, SolverConfig(tol=1e-12, max_iter=120))
    series = diagnostics.series_for(dec)
    c_fit, passed = diagnostics.gronwall_verdict(series)
    me = 0.5 * series.mass + series.energy
    above = me > np.median(me)
    ratio_max = float(np.max(np.abs(series.f_interaction[above]) / me[above]))
    ok = passed and math.isfinite(c_fit) and ratio_max < 0.5
    report(8, "modified-energy growth", ok,
           f"verdict pass with C {c_fit:.3f}; max |f|/(M+E) above median "
           f"{ratio_max:.3f} < 0.5")


def test_criterion_09_mass_derivative_identity():
    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    base = windowed_gaussian(g)
    residuals = {}
    for dt in (2e-3, 1e-3):
        data, _ = rescale_to_smallness(base, SobolevSpec(3, 6.0), 0.3)
        tg = TimeGrid(0.0, dt, int(round(0.5 / dt)))
        _, dec = solve_nls(data, 1, tg, SolverConfig(tol=1e-12, max_iter=100))
        v, u_l = dec.remainder, dec.linear_part
        m = np.array([diagnostics.mass(v.node(i)) for i in range(v.n_nodes)])
        fd = (m[2:] - m[:-2]) / (2 * dt)
        rhs = np.array([diagnostics.mass_derivative_rhs(v.node(i), u_l.node(i))
                        for i in range(1, v.n_nodes - 1)])
        residuals[dt] = float(np.max(np.abs(fd - rhs)))
    order_ratio = residuals[2e-3] / residuals[1e-3]
    ok = 3.0 < order_ratio < 5.0
    report(9, "mass-derivative identity", ok,
           f"residual {residuals[2e-3]:.2e} -> {residuals[1e-3]:.2e} under halving, "
           f"ratio {order_ratio:.2f} in (3, 5)")


def test_criterion_10_backend_agreement():
    g = Grid(-60.0, 120.0 / 1024, 1024, "truncated")
    f = windowed_gaussian(g, sigma=1.0)
    ok = True
    details = []
    for t in (0.1, 0.5, 1.0):
        ref = free_evolve(f, t).values
        scale = np.max(np.abs(ref))
        errs = []
        for q in (8, 16):
            out = free_evolve(f, t, PropagatorBackend("kernel", nodes_per_oscillation=q))
            errs.append(np.max(np.abs(out.values - ref)) / scale)
        shrank = errs[1] < errs[0] / 4 or errs[1] < 1e-11
        ok = ok and shrank
        details.append(f"t={t}: {errs[0]:.1e} -> {errs[1]:.1e}")
    report(10, "backend agreement", ok,
           "; ".join(details) + "; >= 4x shrink per q doubling (floor 1e-11)")
