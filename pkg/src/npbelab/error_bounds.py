"""A priori error bounds for isotropic Clenshaw-Curtis sparse grids.

For an integrand with an analytic extension to a polyellipse of parameter
sigma_hat and sup-modulus M_tilde, the interpolation error in the number of
knots eta decays sub-exponentially once the level exceeds N/log 2 and at
least algebraically below that threshold. All bound constants are explicit
functions of (N, sigma_hat, M_tilde); the prefactor C(sigma) inside C_1 is
configurable and defaults to C2_tilde(sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class BoundParams:
    n_dims: int
    sigma_hat: float
    m_tilde: float
    sigma: float
    mu1: float
    mu2: float
    mu3: float
    c2_tilde: float
    delta_star: float
    a_star: float
    c1: float
    q: float

    def describe(self) -> dict[str, float]:
        return {
            "n_dims": self.n_dims,
            "sigma_hat": self.sigma_hat,
            "m_tilde": self.m_tilde,
            "sigma": self.sigma,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "mu3": self.mu3,
            "c2_tilde": self.c2_tilde,
            "delta_star": self.delta_star,
            "a_star": self.a_star,
            "c1": self.c1,
            "q": self.q,
        }


def a_factor(delta: float, sigma: float) -> float:
    """exp(delta sigma {1/(sigma log^2 2) + 1/(log 2 sqrt(2 sigma))
    + 2 (1 + sqrt(pi/(2 sigma))/log 2)})."""
    brace = (
        1.0 / (sigma * LOG2**2)
        + 1.0 / (LOG2 * math.sqrt(2.0 * sigma))
        + 2.0 * (1.0 + math.sqrt(math.pi / (2.0 * sigma)) / LOG2)
    )
    return math.exp(delta * sigma * brace)


def bound_constants(
    n_dims: int,
    sigma_hat: float,
    m_tilde: float,
    c_sigma: float | None = None,
) -> BoundParams:
    """Evaluate every derived constant of the sparse-grid error bound."""
    if n_dims < 1:
        raise ValueError("need at least one dimension")
    if sigma_hat <= 0:
        raise ValueError("sigma_hat must be positive")
    if m_tilde <= 0:
        raise ValueError("M_tilde must be positive")
    sigma = sigma_hat / 2.0
    c2 = 1.0 + math.sqrt(math.pi / (2.0 * sigma)) / LOG2
    if c_sigma is None:
        c_sigma = c2
    delta_star = (math.e * LOG2 - 1.0) / c2
    a_star = a_factor(delta_star, sigma)
    c1 = 4.0 * m_tilde * c_sigma * a_star / (math.e * delta_star * sigma)
    mu1 = sigma / (1.0 + math.log(2.0 * n_dims))
    mu2 = LOG2 / (n_dims * (1.0 + math.log(2.0 * n_dims)))
    mu3 = sigma * delta_star * c2 / (1.0 + 2.0 * math.log(2.0 * n_dims))
    if c1 == 1.0:
        raise ValueError("degenerate bound: C_1 == 1 makes the prefactor blow up")
    q = (c1 / math.exp(sigma * delta_star * c2)) * max(1.0, c1) ** n_dims / abs(1.0 - c1)
    return BoundParams(
        n_dims=n_dims,
        sigma_hat=sigma_hat,
        m_tilde=m_tilde,
        sigma=sigma,
        mu1=mu1,
        mu2=mu2,
        mu3=mu3,
        c2_tilde=c2,
        delta_star=delta_star,
        a_star=a_star,
        c1=c1,
        q=q,
    )


def predict_error(params: BoundParams, level: int, eta: int) -> tuple[str, float]:
    """(regime, bound) for a grid of the given level with eta knots.

    Sub-exponential regime when level > N / log 2, algebraic otherwise.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    if eta < 1:
        raise ValueError("eta must be at least 1")
    n = params.n_dims
    if level > n / LOG2:
        bound = (
            params.q
            * eta**params.mu3
            * math.exp(-(n * params.sigma / 2.0 ** (1.0 / n)) * eta**params.mu2)
        )
        return "subexponential", bound
    bound = (
        params.c1 * max(1.0, params.c1) ** n / abs(1.0 - params.c1)
    ) * eta ** (-params.mu1)
    return "algebraic", bound
