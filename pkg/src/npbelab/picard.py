"""Fixed-point solver for the nonlinear Poisson-Boltzmann equation.

Each sweep solves the linear problem L u_k = f - N(u_{k-1}) - L w with zero
Dirichlet data and adds back the boundary lift w, i.e. u_k = A(u_{k-1})
with A(v) = K(f - N(v) - L w) + w and K the inverse of L. The nonlinear
tail N(v) = kappa_sq * (sinh v - v) carries no linear part: that lives in L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import median
from typing import Sequence

import numpy as np

from .grid import Grid, discrete_norm
from .operator import EllipticOperator, harmonic_lift, solve_linear


class PicardDivergenceError(RuntimeError):
    """Iterates grew far beyond the initial solve: the contraction condition
    for the iteration map does not hold for this data."""


def _series_tail(u: np.ndarray, order: int) -> np.ndarray:
    """Odd power-series tail sum_{k odd, 3 <= k <= order} u^k / k!."""
    out = np.zeros_like(u)
    term = u.copy()
    fact = 1.0
    for k in range(2, order + 1):
        term = term * u
        fact *= k
        if k % 2 == 1 and k >= 3:
            out += term / fact
    return out


@dataclass
class NpbeProblem:
    """Data for -div(eps grad u) + kappa_sq * sinh(u) = f, u = g on the boundary.

    g is a full-grid array whose boundary entries hold the Dirichlet data
    (see :func:`npbelab.grid.boundary_field`). nonlinearity is "sinh" or an
    odd integer giving the truncation order of the sinh power series.
    """

    grid: Grid
    eps: np.ndarray
    kappa_sq: np.ndarray
    f: np.ndarray
    g: np.ndarray
    nonlinearity: str | int = "sinh"
    harmonic_faces: bool = False

    def __post_init__(self):
        self.eps = self.grid.check_field(self.eps)
        self.kappa_sq = self.grid.check_field(self.kappa_sq)
        self.f = self.grid.check_field(self.f)
        self.g = self.grid.check_field(self.g)
        if self.nonlinearity != "sinh":
            k = int(self.nonlinearity)
            if k < 3 or k % 2 == 0:
                raise ValueError("series truncation order must be an odd integer >= 3")

    def tail(self, u: np.ndarray) -> np.ndarray:
        """N(u) = kappa_sq * (sinh u - u), or its truncated series."""
        if self.nonlinearity == "sinh":
            return self.kappa_sq * (np.sinh(u) - u)
        return self.kappa_sq * _series_tail(u, int(self.nonlinearity))

    def operator(self) -> EllipticOperator:
        return EllipticOperator(
            self.grid, self.eps, self.kappa_sq, harmonic_faces=self.harmonic_faces
        )


@dataclass
class SolveResult:
    u: np.ndarray
    diff_history: list[float]
    residual: float
    converged: bool
    rho_obs: float
    iterations: int
    lift: np.ndarray = field(repr=False, default=None)


def contraction_estimate(diff_history: Sequence[float]) -> float:
    """Median of successive ratios ||u_{k+1}-u_k|| / ||u_k-u_{k-1}||.

    Needs at least two recorded differences (three iterates).
    """
    if len(diff_history) < 2:
        raise ValueError("need at least 3 iterates (2 differences) to estimate contraction")
    ratios = [b / a for a, b in zip(diff_history[:-1], diff_history[1:]) if a > 0]
    if not ratios:
        raise ValueError("all recorded differences are zero")
    return float(median(ratios))


def residual_norm(problem: NpbeProblem, u: np.ndarray) -> float:
    """Discrete L2 norm of -div(eps grad u) + kappa_sq sinh(u) - f over the
    interior nodes (strong-form certification)."""
    op = problem.operator()
    strong = op.apply(u) + problem.tail(u) - problem.f
    inner = problem.grid.interior
    cell = problem.grid.cell_volume
    return float(np.sqrt(cell * np.sum(strong[inner] ** 2)))


def picard_solve(
    problem: NpbeProblem,
    tol: float = 1e-10,
    max_iter: int = 100,
    damping: float = 1.0,
    linear_tol: float | None = None,
    divergence_factor: float = 10.0,
) -> SolveResult:
    """Iterate u_k = A(u_{k-1}) starting from the linearized solution u_0.

    Stops when ||u_k - u_{k-1}||_L2 <= tol * max(1, ||u_k||_L2) or after
    max_iter sweeps. Raises PicardDivergenceError if iterates grow by more
    than divergence_factor over u_0.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    if linear_tol is None:
        linear_tol = min(tol, 1e-10)
    grid = problem.grid
    op = problem.operator()
    lift = harmonic_lift(grid, problem.g)
    l_lift = op.apply(lift)

    # u_0 solves the linearized problem L u = f with the given boundary data.
    x = solve_linear(op, problem.f - l_lift, tol=linear_tol)
    u = x + lift
    norm_u0 = discrete_norm(grid, u, "L2")
    guard = divergence_factor * max(norm_u0, 1e-30)

    diffs: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        rhs = problem.f - problem.tail(u) - l_lift
        x = solve_linear(op, rhs, tol=linear_tol, x0=x)
        u_next = x + lift
        if damping < 1.0:
            u_next = (1.0 - damping) * u + damping * u_next
        diff = discrete_norm(grid, u_next - u, "L2")
        diffs.append(diff)
        u = u_next
        norm_u = discrete_norm(grid, u, "L2")
        if not np.isfinite(norm_u) or norm_u > guard:
            raise PicardDivergenceError(
                f"iterate norm {norm_u:.3e} exceeded {guard:.3e}; the "
                "fixed-point map is not contracting for this data"
            )
        if diff <= tol * max(1.0, norm_u):
            converged = True
            break

    rho = float("nan")
    if len(diffs) >= 2 and diffs[0] > 0:
        try:
            rho = contraction_estimate(diffs)
        except ValueError:
            rho = float("nan")
    return SolveResult(
        u=u,
        diff_history=diffs,
        residual=residual_norm(problem, u),
        converged=converged,
        rho_obs=rho,
        iterations=iterations,
        lift=lift,
    )
