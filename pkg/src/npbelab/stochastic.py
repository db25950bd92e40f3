"""Finite-dimensional-noise coefficient models and the collocation driver.

Coefficients depend on N bounded variables through either an affine
expansion with user-prescribed modes (optionally pushed through a
positivity transform) or a charge-shift model that rigidly displaces a
mollified charge density together with its interior dielectric region.
The driver solves the nonlinear problem at every sparse-grid node (nested
nodes are solved once), integrates the quantity of interest, and reports
per-level errors against a finer reference level.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import error_bounds
from .constants import CoefficientBounds, GeometryParams, evaluate_report
from .grid import Grid, integrate_field
from .picard import NpbeProblem, picard_solve
from .smolyak import SparseGrid, build_sparse_grid

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CoefficientSet:
    eps: np.ndarray
    kappa_sq: np.ndarray
    f: np.ndarray
    g: np.ndarray


def deposit_charges(
    grid: Grid,
    centers: np.ndarray,
    values: np.ndarray,
    width: float,
) -> np.ndarray:
    """Mollify point charges into grid-normalized Gaussians.

    Each bump is normalized by its own discrete integral, so the deposited
    field integrates to the exact total charge.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if centers.shape[0] != values.shape[0]:
        raise ValueError("one magnitude per charge required")
    if width <= 0:
        raise ValueError("mollifier width must be positive")
    mesh = grid.meshgrid()
    f = np.zeros(grid.shape)
    for c, q in zip(centers, values):
        r_sq = sum((mesh[i] - c[i]) ** 2 for i in range(grid.dim))
        bump = np.exp(-r_sq / (2.0 * width * width))
        f += q * bump / integrate_field(grid, bump)
    return f


@dataclass(frozen=True)
class Mode:
    """One fluctuation term: target field, driving variable, amplitude, shape."""

    target: str                 # "eps" | "kappa_sq" | "f" | "g"
    variable: int               # 1-based index of the driving variable
    amplitude: float
    shape: np.ndarray | float = 1.0


@dataclass
class NoiseModel:
    """Affine finite-dimensional noise around mean fields.

    With the positivity transform enabled, the eps accumulator is read in
    log space and realized as a_min + exp(.); kappa_sq is realized as
    exp(.) so it stays nonnegative regardless of the draw.
    """

    grid: Grid
    n_vars: int
    eps0: np.ndarray
    kappa_sq0: np.ndarray
    f0: np.ndarray
    g0: np.ndarray
    modes: list[Mode] = field(default_factory=list)
    ranges: list[tuple[float, float]] | None = None  # physical range per variable
    positivity_transform: bool = False
    a_min: float = 0.0

    def __post_init__(self):
        if not 1 <= self.n_vars:
            raise ValueError("need at least one stochastic variable")
        self.eps0 = self.grid.sample(self.eps0) if np.isscalar(self.eps0) else self.grid.check_field(self.eps0)
        self.kappa_sq0 = self.grid.sample(self.kappa_sq0) if np.isscalar(self.kappa_sq0) else self.grid.check_field(self.kappa_sq0)
        self.f0 = self.grid.sample(self.f0) if np.isscalar(self.f0) else self.grid.check_field(self.f0)
        self.g0 = self.grid.sample(self.g0) if np.isscalar(self.g0) else self.grid.check_field(self.g0)
        if self.ranges is None:
            self.ranges = [(-SQRT3, SQRT3)] * self.n_vars
        if len(self.ranges) != self.n_vars:
            raise ValueError("one physical range per variable required")
        for m in self.modes:
            if m.target not in ("eps", "kappa_sq", "f", "g"):
                raise ValueError(f"unknown mode target {m.target!r}")
            if not 1 <= m.variable <= self.n_vars:
                raise ValueError(f"mode variable {m.variable} out of range")
        if self.positivity_transform and self.a_min <= 0:
            raise ValueError("positivity transform needs a_min > 0")

    def physical(self, y: Sequence[float]) -> np.ndarray:
        """Map internal coordinates in [-1,1]^N to the physical ranges."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n_vars,):
            raise ValueError(f"expected {self.n_vars} coordinates")
        out = np.empty(self.n_vars)
        for k, (lo, hi) in enumerate(self.ranges):
            out[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * y[k]
        return out

    def realize(self, y: Sequence[float]) -> CoefficientSet:
        yp = self.physical(y)
        acc = {
            "eps": self.eps0.copy(),
            "kappa_sq": self.kappa_sq0.copy(),
            "f": self.f0.copy(),
            "g": self.g0.copy(),
        }
        for m in self.modes:
            shape = self.grid.sample(m.shape) if np.isscalar(m.shape) else self.grid.check_field(m.shape)
            acc[m.target] = acc[m.target] + m.amplitude * yp[m.variable - 1] * shape
        if self.positivity_transform:
            acc["eps"] = self.a_min + np.exp(acc["eps"])
            acc["kappa_sq"] = np.exp(acc["kappa_sq"])
        else:
            if np.min(acc["eps"]) <= 0:
                raise ValueError(
                    "realized dielectric is nonpositive; truncated affine "
                    "expansions do not preserve positivity -- enable the "
                    "positivity transform or shrink the amplitudes"
                )
            if np.min(acc["kappa_sq"]) < 0:
                raise ValueError(
                    "realized kappa^2 is negative; enable the positivity "
                    "transform or shrink the amplitudes"
                )
        return CoefficientSet(acc["eps"], acc["kappa_sq"], acc["f"], acc["g"])


def realize_coefficients(model, y) -> CoefficientSet:
    return model.realize(y)


@dataclass
class ChargeShiftModel:
    """Mollified point charges rigidly shifted by the stochastic variables.

    All charges move together by sum_k alpha_k e_k Y_k. Each charge is
    deposited as a grid-normalized Gaussian of width mollifier_width, so
    the total deposited charge equals the prescribed total exactly. The
    interior region is the union of balls of radius interior_radius around
    the shifted charge centers: eps = eps_internal and kappa_sq = 0 there,
    eps_external / kappa_sq_external outside, blended across a band of
    width interface_width (0 gives the sharp indicator split).
    """

    grid: Grid
    n_vars: int
    charge_centers: np.ndarray      # (n_charges, dim)
    charge_values: np.ndarray       # (n_charges,)
    shift_amplitudes: np.ndarray    # (n_vars,)
    shift_directions: np.ndarray    # (n_vars, dim), unit vectors
    eps_internal: float = 2.0
    eps_external: float = 2.0
    kappa_sq_external: float = 1.0
    interior_radius: float = 0.1
    mollifier_width: float | None = None
    interface_width: float | None = None
    ranges: list[tuple[float, float]] | None = None
    support_radius_factor: float = 4.0

    def __post_init__(self):
        self.charge_centers = np.atleast_2d(np.asarray(self.charge_centers, dtype=float))
        self.charge_values = np.atleast_1d(np.asarray(self.charge_values, dtype=float))
        self.shift_amplitudes = np.atleast_1d(np.asarray(self.shift_amplitudes, dtype=float))
        self.shift_directions = np.atleast_2d(np.asarray(self.shift_directions, dtype=float))
        dim = self.grid.dim
        if self.charge_centers.shape[1] != dim:
            raise ValueError("charge centers must match the grid dimension")
        if self.charge_values.shape[0] != self.charge_centers.shape[0]:
            raise ValueError("one magnitude per charge required")
        if self.shift_amplitudes.shape[0] != self.n_vars:
            raise ValueError("one shift amplitude per variable required")
        if self.shift_directions.shape != (self.n_vars, dim):
            raise ValueError("one shift direction per variable required")
        norms = np.linalg.norm(self.shift_directions, axis=1)
        if np.any(norms == 0):
            raise ValueError("shift directions must be nonzero")
        self.shift_directions = self.shift_directions / norms[:, None]
        if self.mollifier_width is None:
            self.mollifier_width = 2.0 * max(self.grid.spacing)
        if self.interface_width is None:
            self.interface_width = 2.0 * max(self.grid.spacing)
        if self.ranges is None:
            self.ranges = [(-SQRT3, SQRT3)] * self.n_vars
        if len(self.ranges) != self.n_vars:
            raise ValueError("one physical range per variable required")
        if self.eps_internal <= 0 or self.eps_external <= 0:
            raise ValueError("dielectric values must be positive")

    def physical(self, y: Sequence[float]) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n_vars,):
            raise ValueError(f"expected {self.n_vars} coordinates")
        out = np.empty(self.n_vars)
        for k, (lo, hi) in enumerate(self.ranges):
            out[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * y[k]
        return out

    def shift_vector(self, y: Sequence[float]) -> np.ndarray:
        yp = self.physical(y)
        return (self.shift_amplitudes[:, None] * self.shift_directions * yp[:, None]).sum(axis=0)

    def realize(self, y: Sequence[float]) -> CoefficientSet:
        grid = self.grid
        shift = self.shift_vector(y)
        centers = self.charge_centers + shift[None, :]
        margin = max(
            self.support_radius_factor * self.mollifier_width,
            self.interior_radius + self.interface_width,
        )
        for c in centers:
            for i in range(grid.dim):
                if c[i] - margin < grid.lower[i] or c[i] + margin > grid.upper[i]:
                    raise ValueError(
                        f"shifted charge support at {tuple(c)} escapes the box "
                        f"(margin {margin:.4g})"
                    )
        f = deposit_charges(grid, centers, self.charge_values, self.mollifier_width)
        # distance to the nearest shifted charge center drives the region split
        mesh = grid.meshgrid()
        dist = np.full(grid.shape, np.inf)
        for c in centers:
            r = np.sqrt(sum((mesh[i] - c[i]) ** 2 for i in range(grid.dim)))
            dist = np.minimum(dist, r)
        if self.interface_width > 0:
            inside = 0.5 * (1.0 - np.tanh((dist - self.interior_radius) / self.interface_width))
        else:
            inside = (dist < self.interior_radius).astype(float)
        eps = self.eps_external + (self.eps_internal - self.eps_external) * inside
        kappa_sq = self.kappa_sq_external * (1.0 - inside)
        g = np.zeros(grid.shape)
        return CoefficientSet(eps, kappa_sq, f, g)


def realize_charge_shift(model: ChargeShiftModel, y) -> CoefficientSet:
    return model.realize(y)


def qoi_spatial_mean(grid: Grid, u: np.ndarray) -> float:
    """Q = integral of the potential over the box."""
    return integrate_field(grid, u)


DEFAULT_SHIFT_AMPLITUDE = {1: 0.15, 2: 0.15, 3: 0.10}
_AXIS_DIRECTIONS = [
    [1.0, 0.0],
    [0.0, 1.0],
    [math.sqrt(0.5), math.sqrt(0.5)],
]


def make_charge_shift_model(
    grid: Grid,
    n_vars: int,
    eps_internal: float = 2.0,
    eps_external: float = 2.0,
    kappa_sq_external: float = 1.0,
    charge: float = 8.0,
    interior_radius: float = 0.1,
    shift_amplitude: float | None = None,
    mollifier_width: float | None = None,
    interface_width: float | None = None,
) -> ChargeShiftModel:
    """Single charge at the box center shifted along the axes (and the
    diagonal for a third variable); the shipped desk-scale configuration."""
    if grid.dim != 2:
        raise ValueError("the shipped charge-shift configuration is 2D")
    if shift_amplitude is None:
        shift_amplitude = DEFAULT_SHIFT_AMPLITUDE[n_vars]
    center = [0.5 * (lo + hi) for lo, hi in zip(grid.lower, grid.upper)]
    scale = min(grid.lengths)
    return ChargeShiftModel(
        grid=grid,
        n_vars=n_vars,
        charge_centers=[center],
        charge_values=[charge],
        shift_amplitudes=[shift_amplitude * scale] * n_vars,
        shift_directions=_AXIS_DIRECTIONS[:n_vars],
        eps_internal=eps_internal,
        eps_external=eps_external,
        kappa_sq_external=kappa_sq_external,
        interior_radius=interior_radius * scale,
        mollifier_width=mollifier_width,
        interface_width=interface_width,
    )


@dataclass
class UqStudyConfig:
    n_vars: int
    levels: list[int]
    reference_level: int
    picard_tol: float = 1e-10
    picard_max_iter: int = 100
    linear_tol: float = 1e-10
    jobs: int = 1
    qoi: str = "spatial_mean"
    bound_sigma_hat: float | None = None
    bound_m_tilde: float | None = None

    def __post_init__(self):
        if self.n_vars not in (1, 2, 3):
            raise ValueError("n_vars must be 1, 2, or 3")
        if not self.levels:
            raise ValueError("need at least one study level")
        if self.reference_level <= max(self.levels):
            raise ValueError("reference level must exceed every study level")
        if self.qoi != "spatial_mean":
            raise ValueError(f"unknown quantity of interest {self.qoi!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass
class StudyRow:
    level: int
    n_nodes: int
    expectation: float
    abs_error: float
    fitted_rate: float
    predicted_bound: float


@dataclass
class StudyReport:
    rows: list[StudyRow]
    reference_level: int
    reference_value: float
    solves_per_level: dict[int, int]
    wellposed_at_center: bool
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def errors(self) -> list[float]:
        return [r.abs_error for r in self.rows if r.level != self.reference_level]

    @property
    def fitted_rate(self) -> float:
        rows = [r for r in self.rows if r.level != self.reference_level]
        return rows[-1].fitted_rate if rows else float("nan")


def _solve_node(args) -> float:
    model, y, picard_tol, picard_max_iter, linear_tol = args
    coeffs = model.realize(y)
    problem = NpbeProblem(
        grid=model.grid,
        eps=coeffs.eps,
        kappa_sq=coeffs.kappa_sq,
        f=coeffs.f,
        g=coeffs.g,
    )
    result = picard_solve(
        problem, tol=picard_tol, max_iter=picard_max_iter, linear_tol=linear_tol
    )
    return qoi_spatial_mean(model.grid, result.u)


def _fit_rate(etas: list[int], errors: list[float]) -> float:
    """Algebraic rate rho from a log-log least-squares fit err ~ C eta^-rho."""
    pts = [(e, v) for e, v in zip(etas, errors) if v > 0]
    if len(pts) < 2:
        return float("nan")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    slope = np.polyfit(lx, ly, 1)[0]
    return float(-slope)


def check_center_wellposedness(model) -> bool:
    """Evaluate the existence/uniqueness report for the unperturbed (y = 0)
    coefficients; advisory only."""
    coeffs = model.realize(np.zeros(model.n_vars))
    geometry = GeometryParams.from_grid(model.grid)
    bounds = CoefficientBounds.from_fields(model.grid, coeffs.eps, coeffs.kappa_sq)
    try:
        rep = evaluate_report(geometry, bounds)
    except ValueError:
        return False
    return bool(rep.flags.get("schauder_ok", False) and rep.flags.get("banach_ok", False))


def run_uq_study(config: UqStudyConfig, model) -> StudyReport:
    """Collocation study: solve at every sparse-grid node, integrate the
    quantity of interest per level, and compare against the reference level.

    Deterministic for a fixed config: nodes are enumerated in a fixed order
    and the reduction never depends on completion order, so ``jobs`` only
    changes wall time, not output.
    """
    if model.n_vars != config.n_vars:
        raise ValueError("model and config disagree on the number of variables")
    wellposed = check_center_wellposedness(model)
    if not wellposed:
        warnings.warn(
            "well-posedness report fails at the center of the parameter box; "
            "continuing (the study does not verify it pointwise)",
            RuntimeWarning,
            stacklevel=2,
        )

    cache: dict[tuple[Fraction, ...], float] = {}
    solves_per_level: dict[int, int] = {}
    all_levels = sorted(set(config.levels) | {config.reference_level})

    def values_for(grid: SparseGrid, level: int) -> np.ndarray:
        missing = [
            (pos, key) for pos, key in enumerate(grid.node_keys) if key not in cache
        ]
        if missing:
            tasks = [
                (model, grid.nodes[pos], config.picard_tol, config.picard_max_iter, config.linear_tol)
                for pos, _ in missing
            ]
            if config.jobs > 1:
                with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                    results = list(pool.map(_solve_node, tasks))
            else:
                results = [_solve_node(t) for t in tasks]
            for (_, key), value in zip(missing, results):
                cache[key] = value
        solves_per_level[level] = len(missing)
        return np.array([cache[key] for key in grid.node_keys])

    expectations: dict[int, float] = {}
    etas: dict[int, int] = {}
    for level in all_levels:
        sg = build_sparse_grid(config.n_vars, level)
        expectations[level] = sg.integrate(values_for(sg, level))
        etas[level] = sg.n_nodes

    reference = expectations[config.reference_level]
    bound_params = None
    if config.bound_sigma_hat is not None and config.bound_m_tilde is not None:
        bound_params = error_bounds.bound_constants(
            config.n_vars, config.bound_sigma_hat, config.bound_m_tilde
        )

    rows: list[StudyRow] = []
    fit_etas: list[int] = []
    fit_errors: list[float] = []
    for level in all_levels:
        err = abs(expectations[level] - reference)
        if level != config.reference_level:
            fit_etas.append(etas[level])
            fit_errors.append(err)
        if bound_params is not None:
            _, bound = error_bounds.predict_error(bound_params, level, etas[level])
        else:
            bound = float("nan")
        rows.append(
            StudyRow(
                level=level,
                n_nodes=etas[level],
                expectation=expectations[level],
                abs_error=err,
                fitted_rate=_fit_rate(fit_etas, fit_errors),
                predicted_bound=bound,
            )
        )
    return StudyReport(
        rows=rows,
        reference_level=config.reference_level,
        reference_value=reference,
        solves_per_level=solves_per_level,
        wellposed_at_center=wellposed,
    )
