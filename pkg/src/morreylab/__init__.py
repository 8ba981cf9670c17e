"""Desk-scale laboratory for fractional diffusion semigroups with Morrey potentials.

Layers, bottom up: `grids` (periodic sampled functions), `indices`
(the two-parameter smoothing calculus), `norms` (Morrey estimators),
`semigroup` (the Fourier-multiplier evolution engine), `potentials` and
`duhamel` (the perturbed evolution by Picard iteration), `verify`
(rate fits and brute-force oracles), and `checks`/`cli` (the runnable
experiment surface).
"""

from .grids import AtomicMeasure, GridFunction
from .indices import (
    MorreyParams,
    PotentialClass,
    ProblemDims,
    ScaleIndex,
    bootstrap_chain,
    choose_alpha,
    exterior_tangent,
    from_index,
    omega_bound,
    smooths_to,
    theta_p,
    to_index,
)
from .norms import RadiusLadder, lp_ball_norm, morrey_norm, uniform_norm
from .potentials import PotentialSpec, constant_potential, power_law_potential
from .semigroup import apply_semigroup, kernel, laplacian_power_symbol, pseudoresolvent
from .duhamel import SolverConfig, Trajectory, picard_solve, sequential_solve

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "GridFunction",
    "MorreyParams",
    "PotentialClass",
    "ProblemDims",
    "ScaleIndex",
    "bootstrap_chain",
    "choose_alpha",
    "exterior_tangent",
    "from_index",
    "omega_bound",
    "smooths_to",
    "theta_p",
    "to_index",
    "RadiusLadder",
    "lp_ball_norm",
    "morrey_norm",
    "uniform_norm",
    "PotentialSpec",
    "constant_potential",
    "power_law_potential",
    "apply_semigroup",
    "kernel",
    "laplacian_power_symbol",
    "pseudoresolvent",
    "SolverConfig",
    "Trajectory",
    "picard_solve",
    "sequential_solve",
    "__version__",
]
