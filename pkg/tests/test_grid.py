import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from npbelab.grid import boundary_field, build_grid, discrete_norm, integrate_field
from npbelab.operator import (
    IndefiniteOperatorError,
    apply_operator,
    assemble_operator,
    harmonic_lift,
    solve_linear,
)


def test_build_grid_interval():
    g = build_grid(1, (0, 1), 5)
    assert g.spacing == (0.25,)
    assert g.diameter == 1.0
    assert g.volume == 1.0


def test_build_grid_cube():
    g = build_grid(3, (0, 1), 9)
    assert_allclose(g.diameter, math.sqrt(3.0), rtol=1e-15)
    assert g.volume == 1.0


def test_build_grid_angstrom_box():
    g = build_grid(3, (0, 70), 33)
    assert_allclose(g.volume, 343000.0, rtol=1e-12)


@pytest.mark.parametrize(
    "dim,corners,nodes",
    [
        (1, (0, 1), 4),       # even node count
        (1, (1, 1), 5),       # degenerate box
        (4, (0, 1), 5),       # unsupported dimension
        (1, (0, 1), 1),       # too few nodes
    ],
)
def test_build_grid_rejects(dim, corners, nodes):
    with pytest.raises(ValueError):
        build_grid(dim, corners, nodes)


def test_constant_coefficient_stencil_rows():
    # interior rows of the 1D operator act as [-1, 2, -1] / h^2
    g = build_grid(1, (0, 1), 5)
    op = assemble_operator(g, np.ones(g.shape), np.zeros(g.shape))
    h2 = g.spacing[0] ** 2
    for k in range(1, 4):
        e = np.zeros(g.shape)
        e[k] = 1.0
        row = op.apply(e)
        expected = np.zeros(g.shape)
        expected[k] = 2.0 / h2
        if k - 1 >= 1:
            expected[k - 1] = -1.0 / h2
        if k + 1 <= 3:
            expected[k + 1] = -1.0 / h2
        assert_allclose(row, expected, atol=1e-12)


def test_apply_constant_field_reduces_to_kappa_term():
    g = build_grid(2, (0, 1), 9)
    c = 3.7
    op = assemble_operator(g, 1.0 + g.meshgrid()[0], np.full(g.shape, c))
    u = np.full(g.shape, 2.0)
    out = apply_operator(op, u)
    assert_allclose(out[g.interior], c * 2.0, rtol=1e-13)
    assert np.all(out[g.boundary_mask()] == 0.0)


def test_apply_zero_field():
    g = build_grid(2, (0, 1), 9)
    op = assemble_operator(g, np.ones(g.shape), np.ones(g.shape))
    assert np.all(apply_operator(op, np.zeros(g.shape)) == 0.0)


def test_apply_sine_eigenfunction():
    g = build_grid(1, (0, 1), 129)
    x = g.axis(0)
    op = assemble_operator(g, np.ones(g.shape), np.zeros(g.shape))
    u = np.sin(np.pi * x)
    lu = apply_operator(op, u)
    err = np.max(np.abs(lu[1:-1] - np.pi**2 * u[1:-1]))
    assert err < 0.002  # O(h^2) at h = 1/128


def test_apply_quadratic_with_mass_term():
    # u = x(1-x) has exact discrete second difference; kappa_sq=1 adds u
    g = build_grid(1, (0, 1), 17)
    x = g.axis(0)
    u = x * (1 - x)
    op = assemble_operator(g, np.ones(g.shape), np.ones(g.shape))
    lu = apply_operator(op, u)
    assert_allclose(lu[1:-1], 2.0 + u[1:-1], rtol=1e-12)


def test_flux_continuity_across_dielectric_interface():
    # eps jumps 3 -> 2 across x=0.5; with harmonic face averages the
    # discrete flux eps u' of the homogeneous solution is constant
    g = build_grid(1, (0, 1), 65)
    x = g.axis(0)
    eps = np.where(x < 0.5, 3.0, 2.0)
    op = assemble_operator(g, eps, np.zeros(g.shape), harmonic_faces=True)
    gb = np.zeros(g.shape)
    gb[-1] = 1.0
    lift = np.zeros(g.shape)
    lift[-1] = 1.0
    rhs = -op.apply(lift)
    u = solve_linear(op, rhs, tol=1e-13) + lift
    flux = op.faces[0] * np.diff(u) / g.spacing[0]
    assert np.max(np.abs(flux - flux[0])) < 1e-9 * abs(flux[0])


def test_solve_zero_rhs():
    g = build_grid(2, (0, 1), 9)
    op = assemble_operator(g, np.ones(g.shape), np.zeros(g.shape))
    assert np.all(solve_linear(op, np.zeros(g.shape)) == 0.0)


def test_solve_inverts_sine():
    g = build_grid(1, (0, 1), 65)
    x = g.axis(0)
    op = assemble_operator(g, np.ones(g.shape), np.zeros(g.shape))
    u = solve_linear(op, np.pi**2 * np.sin(np.pi * x))
    assert np.max(np.abs(u - np.sin(np.pi * x))) < 5e-4


def _unit_square_poisson_center(terms: int = 399) -> float:
    # Fourier series for -Lap u = 1 on (0,1)^2 evaluated at the center
    total = 0.0
    for m in range(1, terms + 1, 2):
        for n in range(1, terms + 1, 2):
            total += (
                16.0
                / (math.pi**4 * m * n * (m * m + n * n))
                * math.sin(m * math.pi / 2)
                * math.sin(n * math.pi / 2)
            )
    return total


def test_solve_unit_square_center_value():
    reference = _unit_square_poisson_center()
    assert abs(reference - 0.07367) < 5e-5  # sanity on the oracle itself
    g = build_grid(2, (0, 1), 65)
    op = assemble_operator(g, np.ones(g.shape), np.zeros(g.shape))
    u = solve_linear(op, np.ones(g.shape))
    assert abs(u[g.center_index] - reference) < 2e-5


def test_solve_rejects_indefinite_operator():
    g = build_grid(1, (0, 1), 17)
    op = assemble_operator(g, np.ones(g.shape), np.full(g.shape, -500.0))
    with pytest.raises(IndefiniteOperatorError):
        solve_linear(op, np.ones(g.shape))


def test_lift_constant_boundary():
    g = build_grid(2, (0, 1), 9)
    w = harmonic_lift(g, boundary_field(g, 4.2))
    assert_allclose(w, 4.2, rtol=1e-11)


def test_lift_linear_1d_exact():
    g = build_grid(1, (0, 1), 33)
    gb = np.zeros(g.shape)
    gb[-1] = 1.0
    w = harmonic_lift(g, gb)
    assert_allclose(w, g.axis(0), atol=1e-12)


def test_lift_harmonic_polynomial():
    g = build_grid(2, (0, 1), 33)
    X, Y = g.meshgrid()
    w = harmonic_lift(g, boundary_field(g, lambda x, y: x * x - y * y))
    assert np.max(np.abs(w - (X * X - Y * Y))) < 1e-10


def test_lift_maximum_principle():
    g = build_grid(2, (0, 1), 17)
    rng = np.random.default_rng(3)
    gb = boundary_field(g, lambda x, y: np.sin(5 * x) + rng.standard_normal() * 0.0)
    gb[g.boundary_mask()] += rng.standard_normal(int(g.boundary_mask().sum()))
    w = harmonic_lift(g, gb)
    bvals = gb[g.boundary_mask()]
    assert np.min(w) >= bvals.min() - 1e-12
    assert np.max(w) <= bvals.max() + 1e-12


def test_norms_of_constant_field():
    g = build_grid(3, (0, 1), 9)
    u = np.ones(g.shape)
    assert_allclose(discrete_norm(g, u, "L2"), 1.0, rtol=1e-13)
    assert_allclose(discrete_norm(g, u, "H2"), 1.0, rtol=1e-13)
    assert discrete_norm(g, u, "Linf") == 1.0


def test_l2_norm_of_sine():
    # the trapezoid sum of sin^2 is exact at every resolution here
    exact = 1.0 / math.sqrt(2.0)
    for n in (33, 65, 129):
        g = build_grid(1, (0, 1), n)
        val = discrete_norm(g, np.sin(np.pi * g.axis(0)), "L2")
        assert abs(val - exact) < 1e-12


def test_norm_kind_validation():
    g = build_grid(1, (0, 1), 5)
    with pytest.raises(ValueError):
        discrete_norm(g, np.zeros(g.shape), "H3")


def test_integrate_constant():
    g = build_grid(3, (0, 1), 5)
    assert_allclose(integrate_field(g, np.full(g.shape, 2.0)), 2.0, rtol=1e-14)


def test_integrate_linear_exact():
    g = build_grid(1, (0, 1), 9)
    assert_allclose(integrate_field(g, g.axis(0)), 0.5, rtol=1e-15)


def test_integrate_quadratic_five_nodes():
    g = build_grid(1, (0, 1), 5)
    assert_allclose(integrate_field(g, g.axis(0) ** 2), 0.34375, rtol=1e-15)


def test_operator_symmetry():
    g = build_grid(2, (0, 1), 17)
    rng = np.random.default_rng(11)
    eps = 1.0 + 0.5 * rng.random(g.shape)
    ksq = rng.random(g.shape)
    op = assemble_operator(g, eps, ksq)
    cell = g.cell_volume
    for _ in range(5):
        u = np.zeros(g.shape)
        v = np.zeros(g.shape)
        u[g.interior] = rng.standard_normal(op.interior_shape)
        v[g.interior] = rng.standard_normal(op.interior_shape)
        a = cell * float(np.sum(op.apply(u) * v))
        b = cell * float(np.sum(u * op.apply(v)))
        assert abs(a - b) <= 1e-12 * max(abs(a), abs(b))


def test_second_order_convergence_manufactured():
    # variable eps, manufactured u* with hand-derived forcing:
    # eps = 1 + x^2, u* = sin(pi x)
    # f = -d/dx(eps u*') + u* = -2x pi cos(pi x) + (1+x^2) pi^2 sin(pi x) + u*
    errs = []
    for n in (17, 33, 65):
        g = build_grid(1, (0, 1), n)
        x = g.axis(0)
        eps = 1.0 + x * x
        ustar = np.sin(np.pi * x)
        f = (
            -2 * x * np.pi * np.cos(np.pi * x)
            + (1 + x * x) * np.pi**2 * np.sin(np.pi * x)
            + ustar
        )
        op = assemble_operator(g, eps, np.ones(g.shape))
        u = solve_linear(op, f, tol=1e-12)
        errs.append(discrete_norm(g, u - ustar, "L2"))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 1.9


def test_elliptic_regularity_consistency():
    from npbelab.constants import CoefficientBounds, GeometryParams, c_h_fourier

    g = build_grid(2, (0, 1), 33)
    geo = GeometryParams.from_grid(g)
    bounds = CoefficientBounds(theta=1, mu=0, eps_w1inf=1, grad_eps_inf=0, kappa_inf_sq=0)
    c_h = c_h_fourier(bounds, geo)
    op = assemble_operator(g, np.ones(g.shape), np.zeros(g.shape))
    rng = np.random.default_rng(42)
    for _ in range(20):
        f = np.zeros(g.shape)
        f[g.interior] = rng.standard_normal(op.interior_shape)
        u = solve_linear(op, f, tol=1e-12)
        ratio = discrete_norm(g, u, "H2") / (c_h * discrete_norm(g, f, "L2"))
        assert ratio <= 1.5
