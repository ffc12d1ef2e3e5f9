"""Pure-numpy implementations of the pointwise hot loops.

Mirrors ``_compiled`` exactly (same arithmetic, same operand order) so the
two backends agree to the last few ulp and can be benchmarked against each
other.
"""

import numpy as np


def abs2(u):
    """|u|^2 as a real array, computed as re^2 + im^2 (no sqrt round trip)."""
    u = np.asarray(u)
    return u.real * u.real + u.imag * u.imag


def cubic(u):
    """Pointwise |u|^2 u."""
    u = np.asarray(u)
    return (u.real * u.real + u.imag * u.imag) * u


def nonlinear_phase(u, dt):
    """Exact sub-flow of i v_t = |v|^2 v over a step dt: v -> exp(-i|v|^2 dt) v."""
    u = np.asarray(u)
    m = u.real * u.real + u.imag * u.imag
    return np.exp(-1j * dt * m) * u


def duhamel_step(acc, f_prev, f_next, phase, half_dt):
    """One trapezoid update of a running Duhamel accumulator (spectral space).

    Returns phase * (acc + half_dt * f_prev) + half_dt * f_next, fused so the
    compiled twin can do it in a single pass.
    """
    return phase * (acc + half_dt * f_prev) + half_dt * f_next
