"""npbelab: a numerical laboratory for the nonlinear Poisson-Boltzmann
equation with uncertain coefficients.

Subpackages cover the structured-grid elliptic machinery, the fixed-point
solver, explicit well-posedness/analyticity constants, Smolyak sparse-grid
collocation, a priori error bounds, finite-dimensional-noise studies, and
the radial non-uniqueness experiments.
"""

__version__ = "0.1.0"

from .grid import Grid, build_grid, boundary_field, discrete_norm, integrate_field
from .operator import (
    EllipticOperator,
    IndefiniteOperatorError,
    SolverError,
    apply_operator,
    assemble_operator,
    harmonic_lift,
    solve_linear,
)
from .picard import NpbeProblem, SolveResult, contraction_estimate, picard_solve, residual_norm

__all__ = [
    "Grid",
    "build_grid",
    "boundary_field",
    "discrete_norm",
    "integrate_field",
    "EllipticOperator",
    "IndefiniteOperatorError",
    "SolverError",
    "apply_operator",
    "assemble_operator",
    "harmonic_lift",
    "solve_linear",
    "NpbeProblem",
    "SolveResult",
    "picard_solve",
    "residual_norm",
    "contraction_estimate",
    "__version__",
]
