import math

import pytest
from numpy.testing import assert_allclose

from npbelab.error_bounds import a_factor, bound_constants, predict_error

LOG2 = math.log(2.0)


def test_mu2_two_dims():
    p = bound_constants(2, 1.0, 1.0)
    assert_allclose(p.mu2, LOG2 / (2.0 * (1.0 + math.log(4.0))), rtol=1e-15)


def test_c2_tilde_at_half_sigma():
    p = bound_constants(2, 1.0, 1.0)  # sigma = 0.5
    assert_allclose(p.c2_tilde, 1.0 + math.sqrt(math.pi) / LOG2, rtol=1e-15)


def test_mu1_two_dims_half_sigma():
    p = bound_constants(2, 1.0, 1.0)
    assert_allclose(p.mu1, 0.5 / (1.0 + math.log(4.0)), rtol=1e-15)


def test_delta_star_and_a_consistency():
    p = bound_constants(3, 2.0, 5.0)
    assert_allclose(p.delta_star, (math.e * LOG2 - 1.0) / p.c2_tilde, rtol=1e-15)
    assert_allclose(p.a_star, a_factor(p.delta_star, p.sigma), rtol=1e-15)
    assert_allclose(
        p.c1,
        4.0 * 5.0 * p.c2_tilde * p.a_star / (math.e * p.delta_star * p.sigma),
        rtol=1e-15,
    )


def test_mu3_formula():
    p = bound_constants(2, 1.0, 1.0)
    assert_allclose(
        p.mu3,
        p.sigma * p.delta_star * p.c2_tilde / (1.0 + 2.0 * math.log(4.0)),
        rtol=1e-15,
    )


def test_regime_split_exact():
    p = bound_constants(2, 1.0, 1.0)
    threshold = 2.0 / LOG2  # 2.885...
    assert predict_error(p, 3, 29)[0] == "subexponential"
    assert predict_error(p, 2, 13)[0] == "algebraic"
    # the split is strict: w = N/log2 itself is algebraic
    p1 = bound_constants(1, 1.0, 1.0)
    assert predict_error(p1, 1, 1)[0] == "algebraic"  # 1 < 1/log2 = 1.4427
    assert predict_error(p1, 2, 3)[0] == "subexponential"
    assert threshold == pytest.approx(2.8853900817779268)


def test_bounds_decrease_in_eta():
    p = bound_constants(2, 1.0, 1.0)
    for level in (2, 5):
        values = [predict_error(p, level, eta)[1] for eta in (10, 100, 1000, 10000)]
        assert all(b < a for a, b in zip(values, values[1:]))


def test_all_constants_positive_over_parameter_box():
    for n in range(1, 7):
        for sigma_hat in (0.1, 0.25, 0.5, 1.0, 2.0, 4.0):
            p = bound_constants(n, sigma_hat, 1.0)
            for v in (p.mu1, p.mu2, p.mu3, p.c2_tilde, p.delta_star, p.a_star, p.c1, p.q):
                assert v > 0


def test_c_sigma_override():
    base = bound_constants(2, 1.0, 1.0)
    doubled = bound_constants(2, 1.0, 1.0, c_sigma=2.0 * base.c2_tilde)
    assert_allclose(doubled.c1, 2.0 * base.c1, rtol=1e-15)


def test_degenerate_c1_rejected():
    # pick C(sigma) so that C_1 evaluates to exactly 1
    probe = bound_constants(2, 1.0, 1.0)
    c_sigma = math.e * probe.delta_star * probe.sigma / (4.0 * probe.m_tilde * probe.a_star)
    with pytest.raises(ValueError):
        bound_constants(2, 1.0, 1.0, c_sigma=c_sigma)


def test_input_validation():
    with pytest.raises(ValueError):
        bound_constants(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        bound_constants(2, -1.0, 1.0)
    with pytest.raises(ValueError):
        bound_constants(2, 1.0, 0.0)
    p = bound_constants(2, 1.0, 1.0)
    with pytest.raises(ValueError):
        predict_error(p, -1, 5)
    with pytest.raises(ValueError):
        predict_error(p, 2, 0)
