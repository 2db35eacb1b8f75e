from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtorus.algebra import QElement, ThetaMatrix, generator, monomial, one
from qtorus.matrix_rep import LpControl
from qtorus.smoothness import (
    certificate_symbol,
    default_grid,
    difference_product_terms,
    k2_oracle,
    k_functional,
    lipschitz_ratio,
    marchaud_check,
    modulus,
    modulus_profile,
)

from conftest import GOLDEN, random_qelement

THETA = ThetaMatrix.from_scalar(GOLDEN, 2)
CTRL = LpControl(levels=(3,))


def test_difference_product_identity():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(500):
        k = int(rng.integers(1, 4))
        d = int(rng.integers(1, 4))
        xi = rng.integers(-6, 7, size=d)
        us = [rng.uniform(-0.5, 0.5, size=d) for _ in range(k)]
        lhs, rhs = difference_product_terms(xi, us)
        worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-10


@pytest.mark.parametrize("m", [(1, 0), (0, 2), (3, 4), (1, 1)])
@pytest.mark.parametrize("k", [1, 2])
def test_modulus_of_monomial_closed_form(m, k):
    x = monomial(THETA, m)
    r = math.hypot(*m)
    grid = default_grid(2, 64, 16)
    for eps in (0.5 / r, 0.25 / r, 0.1 / r):
        val = modulus(x, k, eps, 2, grid, ctrl=CTRL)
        exact = (2 * math.sin(math.pi * eps * r)) ** k
        assert val <= exact * (1 + 1e-12)
        assert val >= 0.99 * exact


def test_modulus_profile_monotone():
    x = random_qelement(np.random.default_rng(2), THETA)
    eps = np.geomspace(1e-3, 0.5, 12)
    prof = modulus_profile(x, 2, eps, [1, 2, "inf"], ctrl=CTRL)
    assert np.all(np.diff(prof.omega, axis=1) >= -1e-12)


def test_modulus_rejects_bad_input():
    x = generator(THETA, 1)
    with pytest.raises(ValueError):
        modulus_profile(x, 0, [0.1], [2])
    with pytest.raises(ValueError):
        modulus_profile(x, 1, [0.0], [2])


def test_lipschitz_limit_of_generator():
    x = generator(THETA, 1)
    out = lipschitz_ratio(x, 1, 2, [2.0 ** -j for j in range(2, 12)], ctrl=CTRL)
    assert out["increasing"]
    assert out["seminorm"] == pytest.approx(2 * math.pi, rel=1e-10)
    assert out["rows"][-1]["omega_over_eps_k"] == pytest.approx(2 * math.pi, rel=1e-5)


@given(st.floats(0.01, 0.4), st.floats(0.01, 0.4))
def test_quasi_subadditivity(a, b):
    # omega(x, a + b) <= omega(x, a) + omega(x, b) for k = 1
    x = random_qelement(np.random.default_rng(9), THETA, deg=3)
    grid = default_grid(2, 32, 8)
    om = modulus_profile(x, 1, sorted({a, b, a + b}), [2], grid, ctrl=CTRL)
    f = dict(zip(om.eps.tolist(), om.omega[0].tolist()))
    # the grid value at a + b is a lower bound, the others are lower bounds too, so allow slack
    assert f[a + b] <= 1.1 * (f[a] + f[b]) + 1e-12


def test_constants_have_zero_modulus_and_pass_marchaud():
    c = 3.0 * one(THETA)
    assert modulus(c, 2, 0.1, 2, ctrl=CTRL) == 0.0
    res = marchaud_check(c, 1, 2, 2, [0.25, 0.125], ctrl=CTRL)
    assert res["violations"] == 0


def test_marchaud_random():
    rng = np.random.default_rng(4)
    for _ in range(5):
        x = random_qelement(rng, THETA)
        for n, N in ((1, 2), (1, 3), (2, 3)):
            res = marchaud_check(x, n, N, 2, [2.0 ** -j for j in range(1, 6)], ctrl=CTRL)
            assert res["violations"] == 0
            assert all(r["upper_ratio"] > 0 for r in res["rows"])


def _k2_brute(x: QElement, t: float, k: int) -> float:
    # per frequency: min_a |1-a|^2 + t^2 w^2 |a|^2 over a in [0, 1]
    from qtorus.smoothness import _w2

    a = np.linspace(0.0, 1.0, 200001)
    total = 0.0
    for c, w2 in zip(x.vals, _w2(x, k)):
        total += abs(c) ** 2 * np.min((1 - a) ** 2 + t * t * w2 * a * a)
    return math.sqrt(total)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("t", [1.0, 0.1, 0.01])
def test_k2_oracle_matches_brute_force(k, t):
    x = random_qelement(np.random.default_rng(7), THETA)
    assert k2_oracle(x, t, k) == pytest.approx(_k2_brute(x, t, k), abs=1e-8)


@pytest.mark.parametrize("t", [0.5, 0.05, 0.005])
def test_certificate_is_an_upper_bound(t):
    x = random_qelement(np.random.default_rng(8), THETA)
    up = k_functional(x, t, 1, 2, ctrl=CTRL)["value"]
    k2 = k_functional(x, t, 1, 2, mode="l2_oracle")["K2"]
    assert up >= k2 * (1 - 1e-12)


def test_certificate_symbol_at_zero_frequency():
    x = one(THETA)
    assert certificate_symbol(x, 0.3, 2) == pytest.approx(np.zeros(1))


def test_k_functional_modes():
    x = generator(THETA, 1)
    with pytest.raises(ValueError):
        k_functional(x, 0.1, 1, 1, mode="l2_oracle")
    with pytest.raises(ValueError):
        k_functional(x, 0.1, 1, 2, mode="nope")
    with pytest.raises(ValueError):
        k_functional(x, -1.0, 1, 2)
    rows = k_functional(x, 0.1, 1, 2, mode="equivalence_check", ctrl=CTRL)["rows"]
    ratios = [r["ratio"] for r in rows]
    assert max(ratios) / min(ratios) < 10
