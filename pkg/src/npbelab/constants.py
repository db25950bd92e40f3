"""Explicit well-posedness and analyticity constants.

Every quantity is an explicit, computable bound: the operator-norm bound
C_D, the Sobolev embedding constant C_S (upper and lower bounds), the
elliptic-regularity constant C_H (a Fourier-multiplier estimate for scalar
dielectrics and a covering-argument estimate for the general case), the
critical ball radius M_0 where the contraction factor reaches one, and the
maximal data size y_0* below which the existence inequality can close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid


def _acosh(x: float) -> float:
    """cosh^{-1}(x) = log(x + sqrt(x^2 - 1)), guarded for x >= 1."""
    if x < 1.0:
        raise ValueError(f"acosh requires x >= 1, got {x}")
    return math.log(x + math.sqrt(x * x - 1.0))


def _bracket(x: float) -> float:
    """Japanese bracket <x> = (1 + x^2)^{1/2}."""
    return math.sqrt(1.0 + x * x)


@dataclass(frozen=True)
class GeometryParams:
    """Diameter, volume, and principal Dirichlet eigenvalue data for a box."""

    dim: int
    diameter: float
    volume: float
    lambda1_exact: float | None = None  # exact value, available for boxes

    def __post_init__(self):
        if self.diameter <= 0 or self.volume <= 0:
            raise ValueError("diameter and volume must be positive")

    @property
    def lambda1_bound(self) -> float:
        """Lower bound pi^2 / d_Omega^2, valid on convex domains."""
        return math.pi**2 / self.diameter**2

    @property
    def lambda1(self) -> float:
        """Best available value: exact when known, else the convex lower bound."""
        return self.lambda1_exact if self.lambda1_exact is not None else self.lambda1_bound

    @classmethod
    def from_box(cls, lengths) -> "GeometryParams":
        lengths = [float(L) for L in lengths]
        if any(L <= 0 for L in lengths):
            raise ValueError("box side lengths must be positive")
        return cls(
            dim=len(lengths),
            diameter=math.sqrt(sum(L * L for L in lengths)),
            volume=math.prod(lengths),
            lambda1_exact=sum(math.pi**2 / (L * L) for L in lengths),
        )

    @classmethod
    def from_grid(cls, grid: Grid) -> "GeometryParams":
        return cls.from_box(grid.lengths)


def lambda1_lower(geometry: GeometryParams) -> tuple[float, float | None]:
    """(pi^2/d_Omega^2 lower bound, exact box eigenvalue or None)."""
    return geometry.lambda1_bound, geometry.lambda1_exact


@dataclass(frozen=True)
class CoefficientBounds:
    """Scalar bounds on the coefficient fields.

    theta: uniform ellipticity lower bound on Re(eps).
    mu: lower-bound defect of Re(kappa^2), i.e. Re(kappa^2) >= -mu.
    eps_w1inf: max of sup|eps| and the componentwise sup of grad eps.
    grad_eps_inf: max_i sup|d_i eps|.
    kappa_inf_sq: (sup|kappa|)^2, which equals sup|kappa^2|.
    """

    theta: float
    mu: float
    eps_w1inf: float
    grad_eps_inf: float
    kappa_inf_sq: float

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if min(self.mu, self.eps_w1inf, self.grad_eps_inf, self.kappa_inf_sq) < 0:
            raise ValueError("bounds must be nonnegative")

    @property
    def kappa_sq_inf(self) -> float:
        return self.kappa_inf_sq

    @classmethod
    def from_fields(cls, grid: Grid, eps: np.ndarray, kappa_sq: np.ndarray) -> "CoefficientBounds":
        eps = grid.check_field(eps)
        kappa_sq = grid.check_field(kappa_sq)
        grads = [
            float(np.max(np.abs(np.diff(eps, axis=i) / grid.spacing[i])))
            for i in range(grid.dim)
        ]
        grad_inf = max(grads)
        return cls(
            theta=float(np.min(eps)),
            mu=max(0.0, -float(np.min(kappa_sq))),
            eps_w1inf=max(float(np.max(np.abs(eps))), grad_inf),
            grad_eps_inf=grad_inf,
            kappa_inf_sq=float(np.max(np.abs(kappa_sq))),
        )


def c_d_upper(bounds: CoefficientBounds, dim: int) -> float:
    """Operator-norm bound 2 d^2 ||eps||_{W^{1,inf}} + ||kappa||_inf^2 for
    L: H^2 -> L^2."""
    return 2.0 * dim * dim * bounds.eps_w1inf + bounds.kappa_inf_sq


def c_s_bounds(p: float, geometry: GeometryParams) -> tuple[float, float, float, float]:
    """Sobolev embedding H^2 -> L^inf on a convex 3D domain.

    Returns (C_{2,p}, C_{p,inf}, C_S_upper, C_S_lower) for an exponent
    p in (3, 6). The L^{p'} integral of |x|^{-2} uses the ball majorant
    B(0, d_Omega) of the difference domain.
    """
    if not 3.0 < p < 6.0:
        raise ValueError(f"p must lie in (3, 6), got {p}")
    if geometry.dim != 3:
        raise ValueError("the embedding bound formulas require a 3D domain")
    d_om = geometry.diameter
    vol = geometry.volume
    gamma = math.gamma
    d2p = (
        d_om ** (1.0 + 3.0 * (p + 2.0) / (2.0 * p))
        * math.pi ** (3.0 * (p + 2.0) / (4.0 * p))
        / (3.0 * vol)
        * gamma(3.0 * (p - 2.0) / (4.0 * p))
        / gamma(3.0 * (p + 2.0) / (4.0 * p))
        * math.sqrt(gamma(3.0 / p) / gamma(3.0 * (p - 1.0) / p))
        * (4.0 / math.sqrt(math.pi)) ** ((p - 2.0) / (2.0 * p))
    )
    c_2p = math.sqrt(2.0) * max(vol ** (1.0 / p - 0.5), d2p)
    p_conj = p / (p - 1.0)
    if 3.0 - 2.0 * p_conj <= 0:
        raise ValueError("radial integral diverges: requires p > 3")
    radial = (4.0 * math.pi / (3.0 - 2.0 * p_conj)) ** (1.0 / p_conj) * d_om ** (
        (3.0 - 2.0 * p_conj) / p_conj
    )
    d_pinf = d_om**3 / (3.0 * vol) * radial
    c_pinf = 2.0 ** (1.0 - 1.0 / p) * max(vol ** (-1.0 / p), d_pinf)
    upper = 2.0 ** (1.0 / p) * c_2p * c_pinf
    lower = vol ** (-0.5)
    return c_2p, c_pinf, upper, lower


def c_s_interval_upper(volume: float) -> float:
    """Elementary interval bound: ||v||_inf^2 <= (1 + 1/|I|) ||v||_{H^1}^2.

    From v(x)^2 <= |I|^{-1}||v||^2 + 2||v|| ||v'|| and Young's inequality;
    used for 1D runs where the 3D embedding formulas do not apply.
    """
    if volume <= 0:
        raise ValueError("interval length must be positive")
    return math.sqrt(1.0 + 1.0 / volume)


def c_h_fourier(
    bounds: CoefficientBounds,
    geometry: GeometryParams,
    lambda1: float | None = None,
) -> float:
    """Elliptic-regularity constant for a scalar dielectric via the Fourier
    multiplier estimate; requires theta * lambda_1 > mu."""
    lam = geometry.lambda1 if lambda1 is None else lambda1
    denom = bounds.theta * lam - bounds.mu
    if denom <= 0:
        raise ValueError(
            "theta * lambda_1 - mu must be positive (uniform invertibility of "
            "the linear part)"
        )
    lead = _bracket(lam ** (1.0 / 3.0)) ** 3 / (lam * bounds.theta)
    load = (
        bounds.kappa_sq_inf
        + math.sqrt(geometry.dim) * bounds.grad_eps_inf * math.sqrt(lam)
    ) / denom
    return lead * (1.0 + load)


def c_h_general(
    bounds: CoefficientBounds,
    geometry: GeometryParams,
    grad_zeta_norm: float,
    covering_n: int,
    lambda1: float | None = None,
) -> float:
    """Elliptic-regularity constant via the interior/boundary covering
    argument. grad_zeta_norm is the sup of |grad zeta| for the cutoff and
    covering_n the number of covering patches; both are caller inputs."""
    if grad_zeta_norm <= 0:
        raise ValueError("grad_zeta_norm must be positive")
    if covering_n < 1:
        raise ValueError("covering_n must be a positive integer")
    lam = geometry.lambda1 if lambda1 is None else lambda1
    theta, mu = bounds.theta, bounds.mu
    denom = theta * lam - mu
    if denom <= 0:
        raise ValueError(
            "theta * lambda_1 - mu must be positive (uniform invertibility of "
            "the linear part)"
        )
    c1 = bounds.eps_w1inf * (grad_zeta_norm + 0.5)
    delta = theta / (2.0 * c1)
    c2 = bounds.eps_w1inf * (
        2.0 * grad_zeta_norm + (1.0 + 2.0 * grad_zeta_norm) / (2.0 * delta)
    )
    c0 = (4.0 / theta) * (
        (2.0 / theta) * (1.0 + bounds.kappa_sq_inf / denom) ** 2
        + lam * (c2 + theta * grad_zeta_norm**2) / denom**2
    )
    base = ((1.0 + lam) / denom) ** 2 + geometry.dim * c0
    return covering_n * math.sqrt(base)


def m0_y0star(
    c_h: float, c_s: float, kappa_sq_inf: float, volume: float
) -> tuple[float, float]:
    """Critical ball radius M_0 and maximal data size y_0*.

    With beta = C_H C_S ||kappa||_inf^2 |Omega|^{1/2}:
      M_0  = C_S^{-1} acosh(1 + 1/beta)
      y_0* = C_S^{-1} ((1 + beta) acosh(1 + 1/beta) - sqrt(1 + 2 beta)).
    """
    beta = c_h * c_s * kappa_sq_inf * math.sqrt(volume)
    if beta <= 0:
        raise ValueError("beta = C_H C_S ||kappa||^2 |Omega|^{1/2} must be positive")
    ac = _acosh(1.0 + 1.0 / beta)
    m0 = ac / c_s
    y0s = ((1.0 + beta) * ac - math.sqrt(1.0 + 2.0 * beta)) / c_s
    return m0, y0s


def compute_y0(c_h: float, c_d: float, f_norm: float, w_norm: float) -> float:
    """Data size y_0 = C_H ||f||_L2 + (C_H C_D + 1) ||w||_H2."""
    if f_norm < 0 or w_norm < 0:
        raise ValueError("norms must be nonnegative")
    return c_h * f_norm + (c_h * c_d + 1.0) * w_norm


def contraction_bound(
    m: float, c_h: float, c_s: float, kappa_sq_inf: float, volume: float
) -> float:
    """Contraction factor of the iteration map on the ball of radius m:
    C_H C_S ||kappa||_inf^2 |Omega|^{1/2} (cosh(C_S m) - 1)."""
    if m < 0:
        raise ValueError("ball radius must be nonnegative")
    return c_h * c_s * kappa_sq_inf * math.sqrt(volume) * (math.cosh(c_s * m) - 1.0)


@dataclass(frozen=True)
class WellposednessCheck:
    schauder_ok: bool
    banach_factor: float

    @property
    def unique(self) -> bool:
        return self.schauder_ok and self.banach_factor < 1.0


def check_wellposedness(
    m: float,
    y0: float,
    c_h: float,
    c_s: float,
    kappa_sq_inf: float,
    volume: float,
) -> WellposednessCheck:
    """Existence and uniqueness inequalities on the ball of radius m.

    Existence: y_0 + C_H ||kappa||^2 |Omega|^{1/2} (sinh(C_S m) - C_S m) <= m.
    Uniqueness: the contraction factor at m is < 1.
    """
    if m <= 0:
        raise ValueError("ball radius must be positive")
    csm = c_s * m
    lhs = y0 + c_h * kappa_sq_inf * math.sqrt(volume) * (math.sinh(csm) - csm)
    factor = contraction_bound(m, c_h, c_s, kappa_sq_inf, volume)
    return WellposednessCheck(schauder_ok=bool(lhs <= m), banach_factor=factor)


@dataclass(frozen=True)
class AnalyticityFlags:
    """Sufficient conditions for an analytic parameter-to-solution map over a
    candidate complex parameter region, evaluated from caller-supplied
    suprema of the data norms over that region."""

    domain_ok: bool   # d_Omega^2 < pi^2 theta C_H
    data_ok: bool     # sup y_0(z) < y_0*(z)
    kappa_ok: bool    # sup ||kappa(z)||^2 <= pi^2 theta / d_Omega^2 - 1/C_H

    @property
    def all_ok(self) -> bool:
        return self.domain_ok and self.data_ok and self.kappa_ok


def check_analyticity(
    geometry: GeometryParams,
    theta: float,
    c_h: float,
    c_s: float,
    c_d: float,
    kappa_sq_sup: float,
    f_norm_sup: float,
    w_norm_sup: float,
) -> AnalyticityFlags:
    d2 = geometry.diameter**2
    domain_ok = d2 < math.pi**2 * theta * c_h
    if kappa_sq_sup > 0:
        _, y0s = m0_y0star(c_h, c_s, kappa_sq_sup, geometry.volume)
    else:
        y0s = math.inf
    y0 = compute_y0(c_h, c_d, f_norm_sup, w_norm_sup)
    data_ok = y0 < y0s
    kappa_ok = kappa_sq_sup <= math.pi**2 * theta / d2 - 1.0 / c_h
    return AnalyticityFlags(domain_ok=bool(domain_ok), data_ok=bool(data_ok), kappa_ok=bool(kappa_ok))


@dataclass
class ConstantsReport:
    """All explicit constants for one problem instance, with provenance."""

    values: dict[str, float] = field(default_factory=dict)
    flags: dict[str, bool] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)

    def set(self, name: str, value, why: str):
        if isinstance(value, bool):
            self.flags[name] = value
        else:
            self.values[name] = float(value)
        self.provenance[name] = why

    def to_kv_block(self) -> str:
        lines = []
        for name, value in self.values.items():
            lines.append(f"{name} = {value:.17g}")
        for name, value in self.flags.items():
            lines.append(f"{name} = {str(value).lower()}")
        return "\n".join(lines) + "\n"

    def rows(self) -> list[tuple[str, str, str]]:
        out = [(k, f"{v:.17g}", self.provenance.get(k, "")) for k, v in self.values.items()]
        out += [(k, str(v).lower(), self.provenance.get(k, "")) for k, v in self.flags.items()]
        return out


def evaluate_report(
    geometry: GeometryParams,
    bounds: CoefficientBounds,
    p: float = 4.0,
    f_norm: float = 0.0,
    w_norm: float = 0.0,
    ball_radius: float | None = None,
    grad_zeta_norm: float | None = None,
    covering_n: int | None = None,
) -> ConstantsReport:
    """Assemble the full machine-checkable report for one instance."""
    rep = ConstantsReport()
    rep.set("dim", geometry.dim, "domain dimension")
    rep.set("diameter", geometry.diameter, "box diagonal")
    rep.set("volume", geometry.volume, "box volume")
    rep.set("lambda1_bound", geometry.lambda1_bound, "pi^2 / diameter^2 (convex domain)")
    if geometry.lambda1_exact is not None:
        rep.set("lambda1_exact", geometry.lambda1_exact, "separable box eigenvalue")
    rep.set("theta", bounds.theta, "ellipticity lower bound")
    rep.set("mu", bounds.mu, "negative-part bound on Re(kappa^2)")
    c_d = c_d_upper(bounds, geometry.dim)
    rep.set("c_d", c_d, "2 d^2 ||eps||_W1inf + ||kappa||_inf^2")
    if geometry.dim == 3:
        _, _, c_s_up, c_s_lo = c_s_bounds(p, geometry)
        rep.set("c_s_upper", c_s_up, f"embedding chain H2 -> W1p -> Linf at p={p}")
    elif geometry.dim == 1:
        c_s_up = c_s_interval_upper(geometry.volume)
        c_s_lo = geometry.volume**-0.5
        rep.set("c_s_upper", c_s_up, "elementary interval embedding bound")
    else:
        c_s_up = None
        c_s_lo = geometry.volume**-0.5
    rep.set("c_s_lower", c_s_lo, "constant-function witness |Omega|^{-1/2}")
    c_h = c_h_fourier(bounds, geometry)
    rep.set("c_h_fourier", c_h, "Fourier multiplier estimate, scalar dielectric")
    if grad_zeta_norm is not None and covering_n is not None:
        rep.set(
            "c_h_general",
            c_h_general(bounds, geometry, grad_zeta_norm, covering_n),
            "covering-argument estimate (tensor dielectric)",
        )
    y0 = compute_y0(c_h, c_d, f_norm, w_norm)
    rep.set("y0", y0, "C_H ||f|| + (C_H C_D + 1) ||w||_H2")
    c_s = c_s_up if c_s_up is not None else c_s_lo
    linear_case = bounds.kappa_sq_inf == 0.0
    rep.set("linear_case", linear_case, "kappa == 0 reduces to the linear problem")
    if linear_case:
        rep.set("m0", math.inf, "no nonlinearity: ball radius unbounded")
        rep.set("y0_star", math.inf, "no nonlinearity: any data size admissible")
        banach = 0.0
        schauder_ok = True
        m_used = ball_radius if ball_radius is not None else max(y0, 1.0)
    else:
        m0, y0s = m0_y0star(c_h, c_s, bounds.kappa_inf_sq, geometry.volume)
        rep.set("m0", m0, "radius where the contraction factor reaches 1")
        rep.set("y0_star", y0s, "largest data size closing the existence inequality")
        m_used = ball_radius if ball_radius is not None else 0.5 * m0
        chk = check_wellposedness(m_used, y0, c_h, c_s, bounds.kappa_inf_sq, geometry.volume)
        banach = chk.banach_factor
        schauder_ok = chk.schauder_ok
    rep.set("ball_radius", m_used, "radius at which the checks are evaluated")
    rep.set("schauder_ok", bool(schauder_ok), "existence inequality at ball_radius")
    rep.set("banach_factor", banach, "contraction factor at ball_radius")
    rep.set("banach_ok", bool(banach < 1.0), "uniqueness requires factor < 1")
    flags = check_analyticity(
        geometry,
        bounds.theta,
        c_h,
        c_s,
        c_d,
        bounds.kappa_inf_sq,
        f_norm,
        w_norm,
    )
    rep.set("analytic_domain_ok", flags.domain_ok, "d_Omega^2 < pi^2 theta C_H")
    rep.set("analytic_data_ok", flags.data_ok, "sup y0 < y0*")
    rep.set("analytic_kappa_ok", flags.kappa_ok, "||kappa||^2 <= pi^2 theta/d^2 - 1/C_H")
    rep.set("analytic_all_ok", flags.all_ok, "conjunction of the three conditions")
    return rep
