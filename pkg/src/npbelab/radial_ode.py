"""Radial nonlinear Bessel-type dynamics and shooting experiments.

Integrates the regularized initial-value problem

    y'' = -A y' / (r + eps_reg) - kt^2 sinh(y) + lam,   y(0) = c, y'(0) = 0,

with a classical fixed-step fourth-order scheme, tracking the energy
H(y, w) = w^2/2 + kt^2 (cosh y - 1) - lam y, which is conserved for A = 0
and dissipated for A > 0. Zero crossings are extracted from a cubic
Hermite dense output. A scalar shooting routine searches for nontrivial
solutions of u'' = (eta - 1) sinh u with u(0) = u(pi) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RadialParams:
    a_coef: float = 2.0          # d - 1 for the radial reduction in dimension d
    kappa_tilde: float = 1.0
    lam: float = 0.0
    c: float = 1.0
    eps_reg: float = 1e-6
    step: float = 1e-3
    r_max: float = 20.0
    y_guard: float = 50.0        # sinh overflow guard

    def __post_init__(self):
        if self.a_coef < 0:
            raise ValueError("damping exponent A must be nonnegative")
        if self.kappa_tilde <= 0:
            raise ValueError("kappa_tilde must be positive")
        if self.eps_reg <= 0:
            raise ValueError("regularization must be positive")
        if self.step <= 0 or self.r_max <= 0:
            raise ValueError("step and r_max must be positive")


def hamiltonian(y, w, kappa_tilde: float, lam: float):
    """H(y, w) = w^2/2 + kt^2 (cosh y - 1) - lam y."""
    return np.asarray(w) ** 2 / 2.0 + kappa_tilde**2 * (np.cosh(np.asarray(y)) - 1.0) - lam * np.asarray(y)


def fixed_point_value(kappa_tilde: float, lam: float) -> float:
    """Rest point sinh^{-1}(lam / kt^2): the constant (trivial) solution."""
    return math.asinh(lam / kappa_tilde**2)


@dataclass
class OdeTrajectory:
    r: np.ndarray
    y: np.ndarray
    w: np.ndarray
    h: np.ndarray
    params: RadialParams
    truncated: bool = False

    def __len__(self) -> int:
        return self.r.size


def _rhs(r: float, y: float, w: float, p: RadialParams) -> tuple[float, float]:
    return w, -p.a_coef * w / (r + p.eps_reg) - p.kappa_tilde**2 * math.sinh(y) + p.lam


def integrate_regularized(params: RadialParams) -> OdeTrajectory:
    """Classical RK4 with fixed step from r = 0 to r_max.

    Stops early (truncated=True) if |y| exceeds the overflow guard.
    """
    p = params
    n_steps = int(round(p.r_max / p.step))
    r_arr = np.empty(n_steps + 1)
    y_arr = np.empty(n_steps + 1)
    w_arr = np.empty(n_steps + 1)
    r, y, w = 0.0, p.c, 0.0
    r_arr[0], y_arr[0], w_arr[0] = r, y, w
    truncated = False
    k = 0
    h = p.step
    for k in range(1, n_steps + 1):
        k1y, k1w = _rhs(r, y, w, p)
        k2y, k2w = _rhs(r + h / 2, y + h / 2 * k1y, w + h / 2 * k1w, p)
        k3y, k3w = _rhs(r + h / 2, y + h / 2 * k2y, w + h / 2 * k2w, p)
        k4y, k4w = _rhs(r + h, y + h * k3y, w + h * k3w, p)
        y = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        w = w + h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
        r = k * h
        r_arr[k], y_arr[k], w_arr[k] = r, y, w
        if abs(y) > p.y_guard:
            truncated = True
            break
    end = k + 1
    r_arr, y_arr, w_arr = r_arr[:end], y_arr[:end], w_arr[:end]
    return OdeTrajectory(
        r=r_arr,
        y=y_arr,
        w=w_arr,
        h=np.asarray(hamiltonian(y_arr, w_arr, p.kappa_tilde, p.lam)),
        params=p,
        truncated=truncated,
    )


def _hermite_eval(t: float, r0: float, r1: float, y0: float, y1: float, w0: float, w1: float) -> float:
    """Cubic Hermite value at t in [r0, r1] from endpoint values/slopes."""
    dt = r1 - r0
    s = (t - r0) / dt
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * dt * w0 + h01 * y1 + h11 * dt * w1


@dataclass
class ZeroScan:
    zeros: list[float]
    identically_at_target: bool = False


def find_zeros(traj: OdeTrajectory, target: float = 0.0, rtol: float = 1e-12) -> ZeroScan:
    """Strict sign-change crossings of y(r) = target, refined by bisection on
    the cubic Hermite dense output. A trajectory identically equal to the
    target yields no crossings and sets the degenerate flag."""
    g = traj.y - target
    scale = max(1.0, float(np.max(np.abs(traj.y))))
    if np.all(np.abs(g) <= 1e-14 * scale):
        return ZeroScan(zeros=[], identically_at_target=True)
    zeros: list[float] = []
    for k in range(len(traj.r) - 1):
        a, b = g[k], g[k + 1]
        if a == 0.0:
            if not zeros or abs(zeros[-1] - traj.r[k]) > rtol:
                zeros.append(float(traj.r[k]))
            continue
        if a * b < 0.0:
            lo, hi = float(traj.r[k]), float(traj.r[k + 1])
            flo = a
            args = (traj.r[k], traj.r[k + 1], traj.y[k], traj.y[k + 1], traj.w[k], traj.w[k + 1])
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = _hermite_eval(mid, *args) - target
                if fm == 0.0 or (hi - lo) <= rtol * max(1.0, abs(mid)):
                    lo = hi = mid
                    break
                if flo * fm < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
    if g[-1] == 0.0:
        zeros.append(float(traj.r[-1]))
    return ZeroScan(zeros=zeros)


@dataclass
class RegularizationReport:
    eps_values: list[float]
    sup_diffs: list[float]
    ratios: list[float]
    cauchy: bool
    hamiltonian_bound_ok: bool
    limit: OdeTrajectory


def vanishing_regularization(
    params: RadialParams,
    eps_sequence: list[float] | None = None,
    window: tuple[float, float] | None = None,
    tol: float = 1e-6,
) -> RegularizationReport:
    """Integrate over a decreasing regularization sequence and report the
    sup-norm Cauchy differences of consecutive trajectories on a window.

    Also certifies the energy confinement H(y, w) <= H(c, 0) + tol along
    every trajectory.
    """
    if eps_sequence is None:
        eps_sequence = [2.0**-k for k in range(4, 13)]
    if any(b >= a for a, b in zip(eps_sequence, eps_sequence[1:])):
        raise ValueError("eps_sequence must be strictly decreasing")
    if window is None:
        window = (0.1, params.r_max)
    lo, hi = window
    trajectories = []
    h0 = float(hamiltonian(params.c, 0.0, params.kappa_tilde, params.lam))
    bound_ok = True
    for eps in eps_sequence:
        p = RadialParams(
            a_coef=params.a_coef,
            kappa_tilde=params.kappa_tilde,
            lam=params.lam,
            c=params.c,
            eps_reg=eps,
            step=params.step,
            r_max=params.r_max,
            y_guard=params.y_guard,
        )
        traj = integrate_regularized(p)
        if float(np.max(traj.h)) > h0 + tol:
            bound_ok = False
        trajectories.append(traj)
    mask = (trajectories[0].r >= lo) & (trajectories[0].r <= hi)
    sup_diffs = []
    for t1, t2 in zip(trajectories, trajectories[1:]):
        m = min(len(t1), len(t2))
        mm = mask[:m]
        sup_diffs.append(float(np.max(np.abs(t1.y[:m][mm] - t2.y[:m][mm]))))
    ratios = [b / a for a, b in zip(sup_diffs, sup_diffs[1:]) if a > 0]
    cauchy = bool(
        sup_diffs
        and all(b < a for a, b in zip(sup_diffs, sup_diffs[1:]))
        and sup_diffs[-1] < tol
    )
    return RegularizationReport(
        eps_values=list(eps_sequence),
        sup_diffs=sup_diffs,
        ratios=ratios,
        cauchy=cauchy,
        hamiltonian_bound_ok=bound_ok,
        limit=trajectories[-1],
    )


@dataclass
class ShootingResult:
    slope: float
    r: np.ndarray
    u: np.ndarray
    amplitude: float
    l2_norm: float
    interior_zeros: int


def _shoot_profile(eta: float, slope: float, length: float, n_steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate u'' = (eta - 1) sinh u, u(0) = 0, u'(0) = slope with RK4."""
    coef = eta - 1.0
    h = length / n_steps
    r = np.linspace(0.0, length, n_steps + 1)
    u = np.empty(n_steps + 1)
    w = np.empty(n_steps + 1)
    ui, wi = 0.0, slope
    u[0], w[0] = ui, wi
    for k in range(1, n_steps + 1):
        k1u, k1w = wi, coef * math.sinh(ui)
        k2u, k2w = wi + h / 2 * k1w, coef * math.sinh(ui + h / 2 * k1u)
        k3u, k3w = wi + h / 2 * k2w, coef * math.sinh(ui + h / 2 * k2u)
        k4u, k4w = wi + h * k3w, coef * math.sinh(ui + h * k3u)
        ui = ui + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        wi = wi + h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
        u[k], w[k] = ui, wi
    return r, u, w


def shoot_scalar_npbe(
    eta: float,
    interval: tuple[float, float] = (0.0, math.pi),
    slope_bracket: tuple[float, float] = (1e-4, 5.0),
    n_scan: int = 256,
    n_steps: int = 4000,
    s_min: float = 1e-6,
) -> ShootingResult | None:
    """Shooting search for a nontrivial solution of u'' = (eta - 1) sinh u
    with u = 0 at both ends of the interval.

    Scans the initial slope over the bracket for a sign change of the
    endpoint value, bisects the first bracket found, and returns the profile
    provided |slope| > s_min; returns None when the endpoint value never
    changes sign over the scan.
    """
    lo, hi = interval
    length = hi - lo
    if length <= 0:
        raise ValueError("interval must have positive length")
    s_lo, s_hi = slope_bracket
    if not (s_hi > s_lo):
        raise ValueError("slope bracket must be increasing")

    def endpoint(s: float) -> float:
        _, u, _ = _shoot_profile(eta, s, length, n_steps)
        return float(u[-1])

    slopes = np.linspace(s_lo, s_hi, n_scan)
    values = [endpoint(s) for s in slopes]
    bracket = None
    for k in range(n_scan - 1):
        if values[k] == 0.0 and abs(slopes[k]) > s_min:
            bracket = (slopes[k], slopes[k])
            break
        if values[k] * values[k + 1] < 0.0:
            bracket = (slopes[k], slopes[k + 1])
            break
    if bracket is None:
        return None
    a, b = bracket
    fa = endpoint(a)
    for _ in range(80):
        if b - a <= 1e-13 * max(1.0, abs(b)):
            break
        mid = 0.5 * (a + b)
        fm = endpoint(mid)
        if fm == 0.0:
            a = b = mid
            break
        if fa * fm < 0:
            b = mid
        else:
            a, fa = mid, fm
    s_star = 0.5 * (a + b)
    if abs(s_star) <= s_min:
        return None
    r, u, _ = _shoot_profile(eta, s_star, length, n_steps)
    interior = u[1:-1]
    sign_changes = int(np.sum(np.sign(interior[:-1]) * np.sign(interior[1:]) < 0))
    h = length / n_steps
    return ShootingResult(
        slope=s_star,
        r=r + lo,
        u=u,
        amplitude=float(np.max(np.abs(u))),
        l2_norm=float(math.sqrt(h * np.sum(u * u))),
        interior_zeros=sign_changes,
    )
