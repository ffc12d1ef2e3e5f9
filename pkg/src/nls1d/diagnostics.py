"""Conserved quantities, the remainder/linear-part interaction functional,
the modified energy, and the exponential-growth verdict.

Conventions.  ``mass`` is the raw integral of |v|^2.  Inside the modified
energy the mass enters with the factor 1/2 (that is the combination the
growth argument actually controls), while the raw value stays available in
the series for conservation checks.

``mass_derivative_rhs`` is the exact time derivative of the raw mass of a
remainder v driven by i v_t + v_xx = |v + u_l|^2 (v + u_l):

    d/dt int |v|^2 = 2 Im int [ |v|^2 u_l + u_l^2 conj(v) + |u_l|^2 u_l ] conj(v) dx.

The three groupings (cubic-in-remainder cross term, quadratic-quadratic
term, remainder against the cubic of the linear part) are verified against
a centered finite difference of the measured mass: the residual decays at
second order in the time step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nls1d import kernels
from nls1d.errors import InvalidSeriesError
from nls1d.grid import GridFunction, differentiate, require_same_grid
from nls1d.picard import PicardDecomposition, TimeGrid, Trajectory

CSV_HEADER = "t,mass,energy,f,modified_energy,v_l2"


def mass(v: GridFunction) -> float:
    """Raw integral of |v|^2 (Riemann sum)."""
    return float(np.sum(kernels.abs2(v.values)) * v.grid.dx)


def energy(v: GridFunction) -> float:
    """(1/2) int |v_x|^2 + (1/4) int |v|^4; both terms nonnegative."""
    vx = differentiate(v, 1)
    a2 = kernels.abs2(v.values)
    return float((0.5 * np.sum(kernels.abs2(vx.values))
                  + 0.25 * np.sum(a2 * a2)) * v.grid.dx)


def pairing(f: GridFunction, g: GridFunction) -> float:
    """Real inner product Re int f conj(g) dx."""
    require_same_grid(f, g)
    return float(np.real(np.sum(f.values * np.conj(g.values))) * f.grid.dx)


def interaction_functional(v: GridFunction, u_l: GridFunction) -> float:
    """Cross terms between remainder and linear part:

    (v, |u_l|^2 u_l) + (|v|^2, |u_l|^2) + 1/2 (v^2, u_l^2) + (|v|^2 v, u_l).
    """
    require_same_grid(v, u_l)
    vv = v.values
    uu = u_l.values
    av2 = kernels.abs2(vv)
    au2 = kernels.abs2(uu)
    dx = v.grid.dx
    term1 = np.real(np.sum(vv * np.conj(au2 * uu)))
    term2 = np.sum(av2 * au2)
    term3 = 0.5 * np.real(np.sum(vv * vv * np.conj(uu * uu)))
    term4 = np.real(np.sum(av2 * vv * np.conj(uu)))
    return float((term1 + term2 + term3 + term4) * dx)


def modified_energy(v: GridFunction, u_l: GridFunction) -> float:
    """Half-mass plus energy plus the interaction functional."""
    return 0.5 * mass(v) + energy(v) + interaction_functional(v, u_l)


def mass_derivative_rhs(v: GridFunction, u_l: GridFunction) -> float:
    """Exact d/dt of the raw mass of the remainder (see module docstring)."""
    require_same_grid(v, u_l)
    vv = v.values
    uu = u_l.values
    vbar = np.conj(vv)
    cross = (kernels.abs2(vv) * uu + uu * uu * vbar + kernels.abs2(uu) * uu) * vbar
    return float(2.0 * np.imag(np.sum(cross)) * v.grid.dx)


def interaction_hoelder_ratio(v: GridFunction, u_l: GridFunction) -> float:
    """|f| over the three-power envelope M^(1/2) + M^(1/3)E^(1/3) + M^(1/6)E^(2/3),
    with the half-mass convention.  The envelope constant depends only on the
    linear part's norms, so the ratio should be stable across runs of one
    data family."""
    m = 0.5 * mass(v)
    e = energy(v)
    envelope = m ** 0.5 + m ** (1 / 3) * e ** (1 / 3) + m ** (1 / 6) * e ** (2 / 3)
    if envelope == 0.0:
        return math.nan
    return abs(interaction_functional(v, u_l)) / envelope


@dataclass
class DiagnosticsSeries:
    """Per-node diagnostics of a solved decomposition."""

    time_grid: TimeGrid
    mass: np.ndarray
    energy: np.ndarray
    f_interaction: np.ndarray
    modified_energy: np.ndarray
    v_l2: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.time_grid.times

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in zip(self.times, self.mass, self.energy, self.f_interaction,
                           self.modified_energy, self.v_l2):
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def build_series(v: Trajectory, u_l: Trajectory) -> DiagnosticsSeries:
    """Fold the trajectories into per-node diagnostic values."""
    n = v.n_nodes
    m_arr = np.empty(n)
    e_arr = np.empty(n)
    f_arr = np.empty(n)
    me_arr = np.empty(n)
    for i in range(n):
        vi = v.node(i)
        ui = u_l.node(i)
        m_arr[i] = mass(vi)
        e_arr[i] = energy(vi)
        f_arr[i] = interaction_functional(vi, ui)
        me_arr[i] = 0.5 * m_arr[i] + e_arr[i] + f_arr[i]
    return DiagnosticsSeries(v.time_grid, m_arr, e_arr, f_arr, me_arr, np.sqrt(m_arr))


def series_for(dec: PicardDecomposition) -> DiagnosticsSeries:
    if dec.remainder is None:
        raise ValueError("decomposition has no solved remainder")
    return build_series(dec.remainder, dec.linear_part)


def gronwall_verdict(series: DiagnosticsSeries) -> tuple[float, bool]:
    """Smallest C >= 0 with E(t) + 1 <= (E(0) + 1) e^{C (t - t0)} at every node.

    Returns (C, passed); passed means a finite such C exists, verified with
    uniform slack 1e-9 on the log scale.  Raises InvalidSeriesError when the
    shifted series is not positive.
    """
    e = series.modified_energy
    t = series.times
    if len(e) < 3:
        raise ValueError("series too short for a growth fit")
    shifted = e + 1.0
    if np.any(shifted <= 0.0):
        raise InvalidSeriesError("modified energy + 1 must stay positive")
    logs = np.log(shifted) - math.log(shifted[0])
    slopes = logs[1:] / (t[1:] - t[0])
    c_fit = max(0.0, float(np.max(slopes)))
    passed = bool(math.isfinite(c_fit)
                  and np.all(logs <= c_fit * (t - t[0]) + 1e-9))
    return c_fit, passed
