"""Pointwise numerical kernels with a compiled core and a numpy fallback.

The Cython extension is used when it is importable; setting the environment
variable ``NLS1D_PURE_PYTHON`` (to any non-empty value) before import forces
the numpy fallback.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

if os.environ.get("NLS1D_PURE_PYTHON"):
    from nls1d.kernels import _fallback as _impl

    USING_COMPILED = False
else:
    try:
        from nls1d.kernels import _compiled as _impl

        USING_COMPILED = True
    except ImportError:
        from nls1d.kernels import _fallback as _impl

        USING_COMPILED = False

abs2 = _impl.abs2
cubic = _impl.cubic
nonlinear_phase = _impl.nonlinear_phase
duhamel_step = _impl.duhamel_step

__all__ = ["USING_COMPILED", "abs2", "cubic", "nonlinear_phase", "duhamel_step"]
