"""Divergence-form elliptic operator on a box grid and its inverse.

The operator is L u = -div(eps grad u) + kappa_sq * u discretized with a
flux-conservative second-order stencil (eps averaged onto cell faces).
Rows belonging to Dirichlet boundary nodes are eliminated: ``apply``
returns zeros there, and ``solve_linear`` treats only interior nodes as
unknowns.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid


class IndefiniteOperatorError(RuntimeError):
    """Conjugate directions hit nonpositive curvature: the discrete operator
    is not positive definite (coercivity needs theta * lambda_1 > mu)."""


class SolverError(RuntimeError):
    """Iterative solve did not reach the requested residual."""


class EllipticOperator:
    """Stencil data for L = -div(eps grad .) + kappa_sq * . on a grid.

    eps is averaged onto cell faces, arithmetically by default or
    harmonically (``harmonic_faces=True``) for piecewise-constant
    interfaces.
    """

    def __init__(
        self,
        grid: Grid,
        eps: np.ndarray,
        kappa_sq: np.ndarray,
        harmonic_faces: bool = False,
    ):
        self.grid = grid
        self.eps = grid.check_field(eps)
        self.kappa_sq = grid.check_field(kappa_sq)
        if np.min(self.eps) <= 0:
            raise ValueError("eps must be positive at every node")
        self.faces: list[np.ndarray] = []
        for i in range(grid.dim):
            a = np.moveaxis(self.eps, i, 0)
            left, right = a[:-1], a[1:]
            if harmonic_faces:
                face = 2.0 * left * right / (left + right)
            else:
                face = 0.5 * (left + right)
            self.faces.append(np.moveaxis(face, 0, i))

    def apply(self, u: np.ndarray) -> np.ndarray:
        """L u at interior nodes using all nodal values; boundary rows are 0."""
        grid = self.grid
        u = grid.check_field(u)
        out = np.zeros(grid.shape)
        inner = grid.interior
        for i in range(grid.dim):
            h = grid.spacing[i]
            flux = self.faces[i] * np.diff(u, axis=i) / h
            contrib = -np.diff(flux, axis=i) / h  # axis i reduced to n_i - 2
            sel = tuple(
                slice(None) if j == i else slice(1, -1) for j in range(grid.dim)
            )
            out[inner] += contrib[sel]
        out[inner] += (self.kappa_sq * u)[inner]
        return out

    def matvec_interior(self, x: np.ndarray) -> np.ndarray:
        """Apply to an interior-node vector with implicit zero boundary."""
        full = np.zeros(self.grid.shape)
        full[self.grid.interior] = x.reshape(self.interior_shape)
        return self.apply(full)[self.grid.interior].ravel()

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(n - 2 for n in self.grid.shape)


def assemble_operator(
    grid: Grid,
    eps: np.ndarray,
    kappa_sq: np.ndarray,
    harmonic_faces: bool = False,
) -> EllipticOperator:
    return EllipticOperator(grid, eps, kappa_sq, harmonic_faces=harmonic_faces)


def apply_operator(op: EllipticOperator, u: np.ndarray) -> np.ndarray:
    return op.apply(u)


def solve_linear(
    op: EllipticOperator,
    rhs: np.ndarray,
    tol: float = 1e-10,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Solve L u = rhs with homogeneous Dirichlet data by conjugate gradients.

    rhs is a full-grid field whose boundary entries are ignored. Returns a
    full-grid field with zeros on the boundary. Deterministic for fixed
    inputs: fixed summation order, no randomized components.
    """
    grid = op.grid
    rhs = grid.check_field(rhs)
    b = rhs[grid.interior].ravel()
    if max_iter is None:
        max_iter = 10 * grid.n_nodes
    b_norm = float(np.linalg.norm(b))
    out = np.zeros(grid.shape)
    if b_norm == 0.0 and x0 is None:
        return out
    if x0 is not None:
        x = grid.check_field(x0)[grid.interior].ravel().copy()
        r = b - op.matvec_interior(x)
    else:
        x = np.zeros(b.size)
        r = b.copy()
    target = tol * max(b_norm, 1e-300)
    rr = float(r @ r)
    p = r.copy()
    for _ in range(max_iter):
        if rr**0.5 <= target:
            out[grid.interior] = x.reshape(op.interior_shape)
            return out
        ap = op.matvec_interior(p)
        pap = float(p @ ap)
        if pap <= 0.0:
            raise IndefiniteOperatorError(
                "nonpositive curvature encountered; operator is not positive "
                "definite (requires theta * lambda_1 > mu)"
            )
        alpha = rr / pap
        x += alpha * p
        r -= alpha * ap
        rr_new = float(r @ r)
        p = r + (rr_new / rr) * p
        rr = rr_new
    if rr**0.5 <= target:
        out[grid.interior] = x.reshape(op.interior_shape)
        return out
    raise SolverError(
        f"conjugate gradients stalled: residual {rr ** 0.5:.3e} "
        f"(target {target:.3e}) after {max_iter} iterations"
    )


def harmonic_lift(grid: Grid, boundary_values: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Discrete harmonic extension: solve Laplace's equation with the given
    Dirichlet data. Satisfies the discrete maximum principle."""
    g = grid.check_field(boundary_values)
    mask = grid.boundary_mask()
    lift = np.zeros(grid.shape)
    lift[mask] = g[mask]
    if not np.any(lift[mask]):
        return lift
    lap = EllipticOperator(grid, np.ones(grid.shape), np.zeros(grid.shape))
    rhs = -lap.apply(lift)
    w = solve_linear(lap, rhs, tol=tol)
    w[mask] = 0.0
    return w + lift
