"""Simulation and verification toolkit for the 1D defocusing cubic
Schrodinger equation i u_t + u_xx = |u|^2 u.

Solves the equation through a free-flow-plus-iterates decomposition with a
fixed-point remainder, cross-validates against a direct split-step
integrator, and measures the dispersive-growth, smallness, and
modified-energy quantities that certify the solve.
"""

from nls1d.grid import (
    Grid,
    GridFunction,
    SobolevSpec,
    differentiate,
    homogeneous_hs_norm,
    lp_norm,
    scale_data,
    sobolev_norm,
)
from nls1d.picard import (
    PicardDecomposition,
    SolverConfig,
    StrichartzPair,
    TimeGrid,
    Trajectory,
    duhamel,
    mixed_norm,
    normalize_to_smallness,
    picard_iterates,
    rescale_to_smallness,
    s0_norm,
    solve_nls,
    solve_remainder,
)
from nls1d.propagator import (
    PropagatorBackend,
    dispersive_ratio,
    free_evolve,
    unitarity_check,
)
from nls1d.reference import OracleConfig, compare, integrate_direct

__version__ = "0.1.0"

__all__ = [
    "Grid", "GridFunction", "SobolevSpec", "differentiate",
    "homogeneous_hs_norm", "lp_norm", "scale_data", "sobolev_norm",
    "PicardDecomposition", "SolverConfig", "StrichartzPair", "TimeGrid",
    "Trajectory", "duhamel", "mixed_norm", "normalize_to_smallness",
    "picard_iterates", "rescale_to_smallness", "s0_norm", "solve_nls",
    "solve_remainder", "PropagatorBackend", "dispersive_ratio", "free_evolve",
    "unitarity_check", "OracleConfig", "compare", "integrate_direct",
    "__version__",
]
