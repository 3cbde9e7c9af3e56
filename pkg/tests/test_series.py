import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardyops.errors import SamplingRadiusFailure
from hardyops.series import (
    PowerSeries,
    compose,
    compose_callable,
    derivative,
    evaluate,
    falling_factorial,
    h2_norm_sq,
    hinf_estimate,
    multiply,
)

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
series = st.lists(coef, min_size=1, max_size=12).map(PowerSeries)


def poly(*c):
    return PowerSeries(c)


# derivative ------------------------------------------------------------------


def test_derivative_power_rule():
    assert derivative(PowerSeries.monomial(2), 1) == poly(0, 2)


def test_third_derivative_of_cube_is_six():
    assert derivative(PowerSeries.monomial(3), 3) == poly(6)


def test_second_derivative_of_geometric_block():
    assert derivative(poly(*[1] * 6), 2) == poly(2, 6, 12, 20)


def test_derivative_past_degree_is_zero():
    d = derivative(poly(1, 2), 5)
    assert d.truncation_order == 0 and d[0] == 0


def test_derivative_rejects_nonpositive_order():
    with pytest.raises(ValueError):
        derivative(poly(1, 2), 0)


@given(series, series, coef, coef, st.integers(1, 4))
def test_derivative_linear(f, g, a, b, k):
    lhs = derivative(f * a + g * b, k)
    rhs = derivative(f, k) * a + derivative(g, k) * b
    n = min(lhs.truncation_order, rhs.truncation_order)
    np.testing.assert_allclose(lhs.coefficients[: n + 1], rhs.coefficients[: n + 1], rtol=1e-12, atol=1e-9)


def test_falling_factorial_scalar_and_array():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(1, 2) == 0
    np.testing.assert_array_equal(falling_factorial(np.arange(4), 2), [0, 0, 2, 6])


# evaluate ----------------------------------------------------------------------


def test_evaluate_constant_term():
    assert evaluate(poly(1, 1), 0) == 1


def test_evaluate_square():
    assert evaluate(PowerSeries.monomial(2), 0.5) == pytest.approx(0.25)


def test_evaluate_geometric():
    s = PowerSeries(0.5 ** np.arange(51))
    assert abs(evaluate(s, 0.8) - 1 / 0.6) < 1e-10


def test_evaluate_outside_disk_rejected():
    with pytest.raises(ValueError):
        evaluate(poly(1, 1), 1.5)


def test_nonfinite_coefficients_rejected():
    with pytest.raises(ValueError):
        PowerSeries([1.0, float("nan")])


# compose -------------------------------------------------------------------------


def test_compose_identity_on_left():
    g = poly(0.1, 0.3, -0.2j, 0.05)
    out = compose(PowerSeries.monomial(1), g, 3)
    np.testing.assert_allclose(out.coefficients, g.coefficients, atol=1e-12)


def test_compose_square_of_half_z():
    out = compose(PowerSeries.monomial(2), poly(0, 0.5), 4)
    np.testing.assert_allclose(out.coefficients, [0, 0, 0.25, 0, 0], atol=1e-12)


def _formal_substitution(f, g, order):
    acc = np.zeros(order + 1, dtype=complex)
    power = np.zeros(order + 1, dtype=complex)
    power[0] = 1
    for c in f.coefficients:
        acc += c * power
        power = np.convolve(power, g.coefficients)[: order + 1]
    return acc


def test_compose_matches_formal_substitution():
    f = PowerSeries(0.5 ** np.arange(81))
    g = poly(0, 0.5, 0.1)
    out = compose(f, g, 40)
    np.testing.assert_allclose(out.coefficients, _formal_substitution(f, g, 40), atol=1e-9)


small = st.lists(st.complex_numbers(max_magnitude=0.25, allow_nan=False), min_size=2, max_size=4)


@given(small, small, small)
def test_compose_associative(a, b, c):
    f, g, h = PowerSeries(a), PowerSeries(b), PowerSeries(c)
    assert hinf_estimate(g, 256) < 0.9 and hinf_estimate(h, 256) < 0.9
    left = compose(f, compose(g, h, 12), 12)
    right = compose(compose(f, g, 12), h, 12)
    np.testing.assert_allclose(left.coefficients, right.coefficients, atol=1e-9)


def test_compose_rejects_map_leaving_disk():
    with pytest.raises(SamplingRadiusFailure):
        compose(poly(1, 1), poly(1.5, 1.0), 4)


def test_compose_callable_matches_series():
    g = poly(0.1, 0.4)
    f = poly(1, 2, 3)
    a = compose(f, g, 2)
    b = compose_callable(f, lambda z: 0.1 + 0.4 * z, 2)
    np.testing.assert_allclose(a.coefficients, b.coefficients, atol=1e-12)


# norms ---------------------------------------------------------------------------


@pytest.mark.parametrize("m", [0, 1, 7, 40])
def test_monomials_are_unit_vectors(m):
    assert h2_norm_sq(PowerSeries.monomial(m)) == 1


def test_zero_norm():
    assert h2_norm_sq(PowerSeries.zero(3)) == 0


def test_norm_is_sum_of_squares():
    assert h2_norm_sq(poly(1, 2, 3)) == 14


def test_hinf_of_half_z():
    assert abs(hinf_estimate(poly(0, 0.5)) - 0.5) < 1e-8


def test_hinf_of_half_one_plus_z():
    assert abs(hinf_estimate(poly(0.5, 0.5)) - 1) < 1e-6


def test_hinf_of_flat_quadratic():
    assert hinf_estimate(poly(0.3, 0.3, 0.3)) == pytest.approx(0.9, abs=1e-6)


@given(st.lists(coef, min_size=1, max_size=8))
def test_parseval_circle_means_increase_to_norm(c):
    s = PowerSeries(c)
    theta = 2 * np.pi * np.arange(64) / 64
    means = [float(np.mean(np.abs(evaluate(s, r * np.exp(1j * theta))) ** 2)) for r in (0.5, 0.9, 0.999999)]
    total = h2_norm_sq(s)
    assert means[0] <= means[1] * (1 + 1e-12) + 1e-12
    assert means[1] <= means[2] * (1 + 1e-12) + 1e-12
    assert abs(means[2] - total) <= 1e-4 * max(1.0, total)


def test_multiply_truncates():
    out = multiply(poly(1, 1), poly(1, 1), 1)
    np.testing.assert_allclose(out.coefficients, [1, 2])


def test_series_is_immutable():
    s = poly(1, 2)
    with pytest.raises(ValueError):
        s.coefficients[0] = 3
    assert math.isclose(abs(s(0.5)), 2.0)
