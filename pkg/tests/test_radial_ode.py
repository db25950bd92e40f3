import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from npbelab.radial_ode import (
    OdeTrajectory,
    RadialParams,
    ShootingResult,
    find_zeros,
    fixed_point_value,
    hamiltonian,
    integrate_regularized,
    shoot_scalar_npbe,
    vanishing_regularization,
)


def test_hamiltonian_at_origin():
    for kt, lam in [(1.0, 0.0), (2.0, 3.0), (0.5, -1.0)]:
        assert hamiltonian(0.0, 0.0, kt, lam) == 0.0


def test_hamiltonian_cosh_value():
    assert hamiltonian(1.0, 0.0, 1.0, 0.0) == pytest.approx(math.cosh(1.0) - 1.0, rel=1e-15)


def test_hamiltonian_minimum_at_rest_point():
    for lam in (0.0, 0.5, 2.0):
        kt = 1.0
        p = fixed_point_value(kt, lam)
        h_min = float(hamiltonian(p, 0.0, kt, lam))
        assert h_min <= 0.0
        if lam == 0.0:
            assert h_min == 0.0
        else:
            assert h_min < 0.0
        ys = np.linspace(p - 2, p + 2, 101)
        assert np.all(hamiltonian(ys, 0.0, kt, lam) >= h_min - 1e-15)


def test_trivial_constant_trajectory():
    lam, kt = 2.0, 1.0
    c = fixed_point_value(kt, lam)
    params = RadialParams(a_coef=2.0, kappa_tilde=kt, lam=lam, c=c, eps_reg=1e-6, step=1e-3, r_max=5.0)
    traj = integrate_regularized(params)
    assert np.max(np.abs(traj.y - c)) < 1e-12
    scan = find_zeros(traj, target=c)
    assert scan.identically_at_target
    assert scan.zeros == []


def test_hamiltonian_conserved_in_one_dimension():
    params = RadialParams(a_coef=0.0, kappa_tilde=1.0, lam=0.0, c=1.0, eps_reg=1e-6, step=1e-3, r_max=20.0)
    traj = integrate_regularized(params)
    assert np.max(np.abs(traj.h - traj.h[0])) < 1e-8


def test_hamiltonian_nonincreasing_in_three_dimensions():
    params = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=1.0, eps_reg=1e-6, step=1e-3, r_max=20.0)
    traj = integrate_regularized(params)
    assert np.max(np.diff(traj.h)) <= 1e-10


def test_trajectory_confined_to_energy_sublevel():
    params = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.5, c=1.5, eps_reg=1e-4, step=1e-3, r_max=10.0)
    traj = integrate_regularized(params)
    h0 = float(hamiltonian(params.c, 0.0, params.kappa_tilde, params.lam))
    assert np.max(traj.h) <= h0 + 1e-8


def test_small_amplitude_matches_spherical_bessel():
    params = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=0.1, eps_reg=1e-6, step=1e-3, r_max=15.0)
    traj = integrate_regularized(params)
    r = traj.r[1:]
    j0 = 0.1 * np.sin(r) / r
    assert np.max(np.abs(traj.y[1:] - j0)) < 5e-4  # cubic-order nonlinear correction
    scan = find_zeros(traj)
    assert abs(scan.zeros[0] - math.pi) / math.pi < 0.02


def test_large_amplitude_zeros_approach_pi_spacing():
    params = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=1.0, eps_reg=1e-6, step=1e-3, r_max=15.0)
    traj = integrate_regularized(params)
    zeros = find_zeros(traj).zeros
    assert len(zeros) >= 3
    gaps = np.diff(zeros)
    assert abs(gaps[-1] - math.pi) < 0.01
    # nontrivial and trivial solutions share the boundary value at R_1
    assert math.sinh(0.0) == 0.0


def test_find_zeros_on_exact_bessel_samples():
    r = np.linspace(1e-9, 15.0, 15001)
    y = np.sin(r) / r
    w = (np.cos(r) * r - np.sin(r)) / r**2
    traj = OdeTrajectory(
        r=r, y=y, w=w, h=np.zeros_like(r), params=RadialParams(), truncated=False
    )
    zeros = find_zeros(traj).zeros
    expected = [math.pi, 2 * math.pi, 3 * math.pi, 4 * math.pi]
    assert len(zeros) >= 4
    assert_allclose(zeros[:4], expected, atol=1e-6)


def test_oddness_of_trajectories():
    base = dict(a_coef=2.0, kappa_tilde=1.0, lam=0.0, eps_reg=1e-6, step=1e-3, r_max=5.0)
    plus = integrate_regularized(RadialParams(c=1.0, **base))
    minus = integrate_regularized(RadialParams(c=-1.0, **base))
    assert np.array_equal(minus.y, -plus.y)
    assert np.array_equal(minus.w, -plus.w)


def test_fourth_order_step_convergence():
    def endpoint(step):
        p = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=1.0, eps_reg=1e-2, step=step, r_max=5.0)
        return integrate_regularized(p).y[-1]

    ref = endpoint(2.5e-4)
    e_coarse = abs(endpoint(2e-3) - ref)
    e_fine = abs(endpoint(1e-3) - ref)
    assert e_coarse / e_fine == pytest.approx(16.0, rel=0.2)


def test_overflow_guard_truncates():
    # the periodic orbit from c = 8 swings through -8, beyond a guard of 5
    params = RadialParams(a_coef=0.0, kappa_tilde=3.0, lam=0.0, c=8.0, eps_reg=1e-6, step=1e-4, r_max=50.0, y_guard=5.0)
    traj = integrate_regularized(params)
    assert traj.truncated
    assert traj.r[-1] < 50.0


def test_vanishing_regularization_a_zero_insensitive():
    params = RadialParams(a_coef=0.0, kappa_tilde=1.0, lam=0.0, c=1.0, step=1e-3, r_max=10.0)
    rep = vanishing_regularization(params, window=(0.1, 10.0))
    assert all(d < 1e-12 for d in rep.sup_diffs)


def test_vanishing_regularization_first_order_in_eps():
    params = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=1.0, step=1e-3, r_max=10.0)
    rep = vanishing_regularization(params, window=(0.1, 10.0), tol=1e-3)
    assert rep.cauchy
    assert rep.hamiltonian_bound_ok
    # differences halve per eps halving up to an O(eps) correction
    assert all(r <= 0.52 for r in rep.ratios)
    assert rep.ratios[-1] == pytest.approx(0.5, abs=5e-3)


def test_vanishing_regularization_rejects_increasing_sequence():
    params = RadialParams(a_coef=2.0)
    with pytest.raises(ValueError):
        vanishing_regularization(params, eps_sequence=[0.1, 0.2])


def test_uniform_energy_bound_along_all_regularizations():
    params = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=1.0, step=1e-3, r_max=10.0)
    h0 = float(hamiltonian(params.c, 0.0, 1.0, 0.0))
    for eps in (2.0**-4, 2.0**-8, 2.0**-12):
        p = RadialParams(a_coef=2.0, kappa_tilde=1.0, lam=0.0, c=1.0, eps_reg=eps, step=1e-3, r_max=10.0)
        traj = integrate_regularized(p)
        assert np.max(traj.h) <= h0 + 1e-6


# --- shooting ---------------------------------------------------------------
# The scan over initial slopes is itself the oracle for where nontrivial
# solutions live. For u'' = (eta - 1) sinh u on (0, pi) the sinh tail
# stiffens the oscillation, so the half-period of every orbit is strictly
# below pi / sqrt(1 - eta): single-arch solutions with u(pi) = 0 exist for
# small eta > 0 (amplitude ~ sqrt(8 eta)) and none exist for eta < 0 within
# the default slope bracket.


def test_shooting_finds_branch_for_positive_eta():
    res = shoot_scalar_npbe(0.5)
    assert isinstance(res, ShootingResult)
    assert res.interior_zeros == 0
    assert res.amplitude > 1.0
    # mirrored solution at negative slopes (odd nonlinearity)
    neg = shoot_scalar_npbe(0.5, slope_bracket=(-5.0, -1e-4))
    assert neg is not None
    assert neg.slope == pytest.approx(-res.slope, rel=1e-6)
    assert neg.amplitude == pytest.approx(res.amplitude, rel=1e-6)


def test_shooting_none_for_negative_eta_in_default_bracket():
    assert shoot_scalar_npbe(-0.05) is None


def test_shooting_two_arch_solution_outside_default_bracket():
    res = shoot_scalar_npbe(-0.05, slope_bracket=(1e-4, 10.0))
    assert res is not None
    assert res.interior_zeros == 1
    assert res.amplitude > 3.0  # not a small solution


def test_shooting_amplitude_shrinks_toward_bifurcation_point():
    amps = []
    for eta in (0.2, 0.1, 0.05, 0.01):
        res = shoot_scalar_npbe(eta)
        assert res is not None
        amps.append(res.amplitude)
    assert all(b < a for a, b in zip(amps, amps[1:]))
    # leading-order amplitude from the branch expansion eta = amp^2 / 8
    assert amps[-1] == pytest.approx(math.sqrt(8 * 0.01), rel=0.05)


def test_shooting_endpoint_residual_small():
    res = shoot_scalar_npbe(0.1)
    assert res is not None
    assert abs(res.u[-1]) < 1e-8


def test_shooting_validation():
    with pytest.raises(ValueError):
        shoot_scalar_npbe(0.1, interval=(1.0, 1.0))
    with pytest.raises(ValueError):
        shoot_scalar_npbe(0.1, slope_bracket=(2.0, 1.0))
