"""Structured box grids, nodal scalar fields, discrete norms, and quadrature.

Fields are plain ``numpy`` arrays shaped like ``grid.shape`` (one value per
node, ``indexing="ij"`` convention). All node counts are odd so the box
center is itself a node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

NORM_KINDS = ("L2", "H1", "H2", "Linf")


@dataclass(frozen=True)
class Grid:
    """Axis-aligned box discretization with uniform spacing per axis.

    lower/upper are the box corners, shape the node count per axis
    (each odd, >= 3).
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        d = len(self.shape)
        if d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2, or 3, got {d}")
        if len(self.lower) != d or len(self.upper) != d:
            raise ValueError("corner/shape dimension mismatch")
        for lo, hi, n in zip(self.lower, self.upper, self.shape):
            if not hi > lo:
                raise ValueError(f"degenerate box: [{lo}, {hi}]")
            if n < 3:
                raise ValueError(f"need at least 3 nodes per axis, got {n}")
            if n % 2 == 0:
                raise ValueError(f"node count per axis must be odd, got {n}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (hi - lo) / (n - 1) for lo, hi, n in zip(self.lower, self.upper, self.shape)
        )

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def diameter(self) -> float:
        return math.sqrt(sum(L * L for L in self.lengths))

    @property
    def volume(self) -> float:
        return math.prod(self.lengths)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def n_nodes(self) -> int:
        return math.prod(self.shape)

    def axis(self, i: int) -> np.ndarray:
        return np.linspace(self.lower[i], self.upper[i], self.shape[i])

    def meshgrid(self) -> list[np.ndarray]:
        return list(np.meshgrid(*(self.axis(i) for i in range(self.dim)), indexing="ij"))

    @property
    def interior(self) -> tuple[slice, ...]:
        return tuple(slice(1, -1) for _ in range(self.dim))

    def boundary_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[self.interior] = False
        return mask

    @property
    def center_index(self) -> tuple[int, ...]:
        return tuple(n // 2 for n in self.shape)

    def check_field(self, u: np.ndarray) -> np.ndarray:
        """Validate that u is a nodal field on this grid; returns a float array."""
        arr = np.asarray(u, dtype=float)
        if arr.shape != self.shape:
            raise ValueError(f"field shape {arr.shape} does not match grid {self.shape}")
        return arr

    def sample(self, fn: Callable[..., np.ndarray] | float) -> np.ndarray:
        """Evaluate fn(x1, ..., xd) on all nodes; scalars broadcast."""
        if callable(fn):
            return np.asarray(fn(*self.meshgrid()), dtype=float) * np.ones(self.shape)
        return np.full(self.shape, float(fn))


def build_grid(
    dim: int,
    corners: Sequence,
    nodes_per_axis: int | Sequence[int],
) -> Grid:
    """Build a box grid.

    corners: one (lo, hi) pair applied to every axis, or a sequence of d
    pairs. nodes_per_axis: an odd int applied per axis, or a sequence of d.
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2, or 3, got {dim}")
    corners = list(corners)
    if len(corners) == 2 and np.isscalar(corners[0]):
        pairs = [tuple(corners)] * dim
    else:
        pairs = [tuple(c) for c in corners]
    if len(pairs) != dim:
        raise ValueError(f"expected {dim} corner pairs, got {len(pairs)}")
    if np.isscalar(nodes_per_axis):
        counts = [int(nodes_per_axis)] * dim
    else:
        counts = [int(n) for n in nodes_per_axis]
    if len(counts) != dim:
        raise ValueError(f"expected {dim} node counts, got {len(counts)}")
    lower = tuple(float(lo) for lo, _ in pairs)
    upper = tuple(float(hi) for _, hi in pairs)
    return Grid(lower=lower, upper=upper, shape=tuple(counts))


def boundary_field(grid: Grid, g: Callable[..., np.ndarray] | float) -> np.ndarray:
    """Full-grid array carrying Dirichlet values on boundary nodes, 0 inside."""
    full = grid.sample(g)
    out = np.zeros(grid.shape)
    mask = grid.boundary_mask()
    out[mask] = full[mask]
    return out


def _forward_diff(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    return np.diff(u, axis=axis) / h


def _centered_first(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centered first difference, one-sided second-order at the two ends."""
    u = np.moveaxis(u, axis, 0)
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - u[:-2]) / (2 * h)
    out[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    out[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    return np.moveaxis(out, 0, axis)


def _centered_second(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centered second difference, one-sided second-order at the two ends."""
    u = np.moveaxis(u, axis, 0)
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / (h * h)
    out[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / (h * h)
    out[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


def _quad_weight(grid: Grid, shape: tuple[int, ...]) -> np.ndarray:
    """Tensor quadrature weight for an array of the given shape: axes at the
    full node count get trapezoid weights (halved endpoints), axes of length
    n_i - 1 carry staggered (cell-tiling) weights h_i."""
    w = np.ones(shape)
    for i, n in enumerate(shape):
        h = grid.spacing[i]
        axis_w = np.full(n, h)
        if n == grid.shape[i]:
            axis_w[0] *= 0.5
            axis_w[-1] *= 0.5
        elif n != grid.shape[i] - 1:
            raise ValueError("unexpected array shape for quadrature weights")
        sl: list = [None] * len(shape)
        sl[i] = slice(None)
        w = w * axis_w[tuple(sl)]
    return w


def _weighted_sq(grid: Grid, arr: np.ndarray) -> float:
    return float(np.sum(_quad_weight(grid, arr.shape) * arr * arr))


def discrete_norm(grid: Grid, u: np.ndarray, kind: str = "L2") -> float:
    """Discrete Sobolev norms by trapezoid-type nodal quadrature, so that a
    constant field has exactly its continuum norm.

    H1 adds the squared forward differences (which tile the cells exactly);
    H2 additionally sums pure second differences (centered, one-sided at the
    boundary) and mixed second differences, one term per multi-index of
    order <= 2.
    """
    u = grid.check_field(u)
    if kind not in NORM_KINDS:
        raise ValueError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
    if kind == "Linf":
        return float(np.max(np.abs(u)))
    h = grid.spacing
    total = _weighted_sq(grid, u)
    if kind in ("H1", "H2"):
        for i in range(grid.dim):
            total += _weighted_sq(grid, _forward_diff(u, i, h[i]))
    if kind == "H2":
        for i in range(grid.dim):
            total += _weighted_sq(grid, _centered_second(u, i, h[i]))
        for i in range(grid.dim):
            for j in range(i + 1, grid.dim):
                dij = _centered_first(_centered_first(u, i, h[i]), j, h[j])
                total += _weighted_sq(grid, dij)
    return math.sqrt(total)


def integrate_field(grid: Grid, u: np.ndarray) -> float:
    """Tensorized trapezoidal rule over the box; exact for multilinear fields."""
    u = grid.check_field(u)
    acc = u
    for i in range(grid.dim - 1, -1, -1):
        w = np.full(grid.shape[i], grid.spacing[i])
        w[0] *= 0.5
        w[-1] *= 0.5
        acc = np.tensordot(acc, w, axes=([i], [0]))
    return float(acc)
