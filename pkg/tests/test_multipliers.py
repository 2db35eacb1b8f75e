from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtorus.algebra import ThetaMatrix, generator, monomial
from qtorus.multipliers import (
    DomainError,
    Symbol,
    apply,
    bessel,
    bessel_symbol,
    circular_semigroup_symbol,
    derivative,
    difference,
    fejer,
    laplacian,
    parse_symbol,
    riesz,
    riesz_symbol,
    semigroup,
    semigroup_symbol,
    strip_mean,
    translate,
)

from conftest import GOLDEN, elements

THETA = ThetaMatrix.from_scalar(GOLDEN, 2)


def coeffs_close(x, y, tol=1e-12):
    keys = set(x.coeffs) | set(y.coeffs)
    return all(abs(x.coefficient(m) - y.coefficient(m)) <= tol * (1 + abs(y.coefficient(m))) for m in keys)


def test_derivative_of_monomial():
    x = derivative(monomial(THETA, (2, -3)), (1, 2))
    assert abs(x.coefficient((2, -3)) - (2j * math.pi * 2) * (2j * math.pi * -3) ** 2) < 1e-9


@given(elements(THETA), elements(THETA), st.integers(0, 1))
def test_leibniz_rule(x, y, j):
    mu = (1, 0) if j == 0 else (0, 1)
    lhs = derivative(x * y, mu)
    rhs = derivative(x, mu) * y + x * derivative(y, mu)
    assert coeffs_close(lhs, rhs, 1e-10)


def test_laplacian_is_sum_of_second_derivatives():
    x = monomial(THETA, (1, 2), 1.5) + monomial(THETA, (-2, 0))
    assert coeffs_close(laplacian(x), derivative(x, (2, 0)) + derivative(x, (0, 2)))


@given(elements(THETA), st.floats(-2, 2), st.floats(-2, 2))
def test_bessel_group_law(x, a, b):
    assert coeffs_close(bessel(bessel(x, a), b), bessel(x, a + b), 1e-9)


def test_riesz_needs_zero_mean():
    x = monomial(THETA, (0, 0)) + generator(THETA, 0)
    with pytest.raises(DomainError, match="zero mean"):
        riesz(x, 1.0)
    mean, rest = strip_mean(x)
    assert mean == 1 and abs(riesz(rest, 2.0).coefficient((1, 0)) - 1.0) < 1e-15
    assert abs(riesz_symbol(1.0)((3, 4)) - 5.0) < 1e-12
    assert abs(bessel_symbol(2.0)((1, 1)) - 3.0) < 1e-12


def test_translation_and_difference():
    x = monomial(THETA, (1, 1))
    u = np.array([0.1, 0.2])
    ph = np.exp(2j * math.pi * 0.3)
    assert abs(translate(x, u).coefficient((1, 1)) - ph) < 1e-14
    assert abs(difference(x, u, 2).coefficient((1, 1)) - (ph - 1) ** 2) < 1e-14


@pytest.mark.parametrize("kind", ["poisson", "heat"])
def test_semigroup_property(kind):
    f = np.array([[0, 0], [1, 2], [-3, 1]])
    a = semigroup_symbol(kind, 0.1).evaluate(f) * semigroup_symbol(kind, 0.05).evaluate(f)
    assert np.allclose(a, semigroup_symbol(kind, 0.15).evaluate(f), rtol=1e-13)


def test_semigroup_derivative_matches_finite_difference():
    f = np.array([[1, 2], [3, 0]])
    h = 1e-6
    for kind in ("poisson", "heat"):
        num = (semigroup_symbol(kind, 0.1 + h).evaluate(f) - semigroup_symbol(kind, 0.1 - h).evaluate(f)) / (2 * h)
        ana = semigroup_symbol(kind, 0.1, 1).evaluate(f)
        assert np.allclose(num, ana, rtol=1e-6)


def test_negative_k_needs_zero_mean():
    with pytest.raises(DomainError):
        semigroup_symbol("poisson", 0.1, -1).evaluate(np.array([[0, 0]]))


def test_circular_symbols():
    f = np.array([[1, 2], [2, 0], [0, 3]])
    r = 0.7
    a = np.sqrt(np.sum(f ** 2, axis=1))
    assert np.allclose(circular_semigroup_symbol("poisson", r).evaluate(f), r ** a)
    h = 1e-6
    num = (circular_semigroup_symbol("poisson", r + h).evaluate(f)
           - circular_semigroup_symbol("poisson", r - h).evaluate(f)) / (2 * h)
    assert np.allclose(circular_semigroup_symbol("poisson", r, 1).evaluate(f), num, rtol=1e-6)
    num2 = (circular_semigroup_symbol("heat", r + h).evaluate(f) - 2 * circular_semigroup_symbol("heat", r).evaluate(f)
            + circular_semigroup_symbol("heat", r - h).evaluate(f)) / h ** 2
    assert np.allclose(circular_semigroup_symbol("heat", r, 2).evaluate(f), num2, rtol=1e-3)
    with pytest.raises(DomainError, match="must be removed"):
        circular_semigroup_symbol("poisson", r, 2).evaluate(np.array([[1, 0]]))


def test_fejer_weights():
    x = monomial(THETA, (1, -2)) + monomial(THETA, (4, 0))
    y = fejer(x, 3)
    assert abs(y.coefficient((1, -2)) - (3 / 4) * (2 / 4)) < 1e-15
    assert y.coefficient((4, 0)) == 0


def test_parse_symbol():
    f = np.array([[1, 1]])
    assert np.allclose(parse_symbol("bessel:alpha=2", 2).evaluate(f), 3.0)
    assert np.allclose(parse_symbol("diff:u=0.25,0:k=1", 2).evaluate(f), 1j - 1)
    assert np.allclose(parse_symbol("deriv:mu=1,0", 2).evaluate(f), 2j * math.pi)
    with pytest.raises(ValueError):
        parse_symbol("nope:a=1", 2)
    with pytest.raises(ValueError):
        parse_symbol("heat", 2)


def test_symbol_products_and_tables():
    s = Symbol.table({(1, 0): 2.0}) * bessel_symbol(2.0)
    assert s((1, 0)) == 4.0 and s((0, 1)) == 0
    x = monomial(THETA, (1, 0)) + monomial(THETA, (0, 1))
    assert apply(s, x).support == [(1, 0)]


def test_heat_symbol_via_semigroup_apply():
    x = monomial(THETA, (1, 0))
    assert abs(semigroup(x, "heat", 0.01).coefficient((1, 0)) - math.exp(-4 * math.pi ** 2 * 0.01)) < 1e-15
