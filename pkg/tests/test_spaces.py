from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from qtorus.algebra import ThetaMatrix, generator, monomial
from qtorus.littlewood_paley import block_coefficients
from qtorus.matrix_rep import LpControl
from qtorus.multipliers import circular_coefficients
from qtorus.spaces import (
    ConstraintError,
    QuadratureGrid,
    besov_norm,
    besov_norm_semigroup,
    gram_element,
    hardy_norm,
    lq_aggregate,
    potential_norm,
    riesz_potential_norm,
    sobolev_norm,
    triebel_norm,
    triebel_norm_poisson,
)

from conftest import GOLDEN, random_qelement

THETA = ThetaMatrix.from_scalar(GOLDEN, 2)


def semigroup_oracle(x, kind, alpha, k, q):
    """Scalar quadrature of the p = 2 characterization (Plancherel inside).

    The power of eps (or 1 - r) is passed to QUADPACK as an algebraic weight.
    """
    f = x.freqs.astype(float)
    c = np.abs(x.vals)
    r = np.sqrt(np.sum(f ** 2, axis=1))
    if kind in ("poisson-eps", "heat-eps"):
        lam = 2 * math.pi * r if kind == "poisson-eps" else 4 * math.pi ** 2 * r ** 2
        w = k - alpha if kind == "poisson-eps" else k - alpha / 2
        mask = (r > 0) if k else np.ones_like(r, dtype=bool)

        def g(e):
            s = np.where(mask, lam ** k * np.exp(-e * lam), 0.0)
            return math.sqrt(np.sum((c * s) ** 2)) ** q

        head = abs(x.mean())
        integral = quad(g, 0, 1, weight="alg", wvar=(w * q - 1, 0), limit=400, epsabs=1e-14)[0]
    else:
        a = r if kind == "circular-poisson" else r ** 2
        w = k - alpha if kind == "circular-poisson" else k - alpha / 2
        low = a < k
        head = float(np.max(c[low])) if np.any(low) else 0.0
        keep = ~low if kind == "circular-poisson" else np.ones_like(low)
        coef = circular_coefficients(a, k)

        def g(t):
            s = np.where(keep, coef * t ** np.where(a - k == 0, 0, a - k), 0.0)
            return math.sqrt(np.sum((c * s) ** 2)) ** q

        integral = quad(g, 0, 1, weight="alg", wvar=(0, w * q - 1), limit=400, epsabs=1e-14)[0]
    return (head ** q + integral) ** (1 / q)


@pytest.mark.parametrize("kind,k,alpha", [
    ("poisson-eps", 1, 0.5), ("poisson-eps", 0, -1.0), ("poisson-eps", 2, 1.0),
    ("heat-eps", 1, 0.5), ("heat-eps", 0, -1.0),
    ("circular-poisson", 1, 0.5), ("circular-poisson", 2, 1.0),
    ("circular-heat", 1, 0.5), ("circular-heat", 1, 1.0),
])
@pytest.mark.parametrize("q", [1.0, 2.0])
def test_semigroup_besov_matches_scalar_oracle(kind, k, alpha, q):
    x = monomial(THETA, (2, 1), 1.5) + monomial(THETA, (-3, 0), 0.5j) + monomial(THETA, (1, 0), 0.3)
    if kind.startswith("poisson") or kind.startswith("heat"):
        x = x + monomial(THETA, (0, 0), 0.7)
    got = besov_norm_semigroup(x, alpha, 2, q, kind, k).value
    want = semigroup_oracle(x, kind, alpha, k, q)
    assert abs(got - want) < 1e-6 * want


def test_single_frequency_besov_closed_form():
    for k in range(0, 4):
        x = monomial(THETA, (2 ** k, 0))
        for p in (1, 2, "inf"):
            got = besov_norm(x, 0.5, p, 2, ctrl=LpControl(levels=(2 ** k + 1,))).value
            assert abs(got - 2 ** (0.5 * k)) < 1e-3


def test_besov_is_nonincreasing_in_q():
    x = random_qelement(np.random.default_rng(0), THETA, deg=5, terms=10)
    vals = [besov_norm(x, 0.5, 2, q).value for q in (1, 2, 4, math.inf)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert besov_norm(monomial(THETA, (0, 0)), 1.0, 1, 3).value == 1.0


def test_sobolev_and_potentials():
    u1 = generator(THETA, 0)
    assert abs(sobolev_norm(u1, 1, 2).value - math.sqrt(1 + 4 * math.pi ** 2)) < 1e-12
    assert abs(sobolev_norm(u1, 1, 2, seminorm_only=True).value - 2 * math.pi) < 1e-12
    x = monomial(THETA, (1, 2))
    assert abs(potential_norm(x, 1.5, 2).value - 6 ** 0.75) < 1e-12
    assert abs(potential_norm(x, 0.0, 2).value - 1) < 1e-12
    y = x + monomial(THETA, (0, 0), 2)
    assert abs(riesz_potential_norm(y, 2.0, 2).value - math.sqrt(4 + 25)) < 1e-12


def test_constraints_are_reported():
    with pytest.raises(ConstraintError, match="k > alpha"):
        besov_norm_semigroup(generator(THETA, 0), 1.0, 2, 2, "poisson-eps", 1)
    with pytest.raises(ConstraintError, match="alpha/2"):
        besov_norm_semigroup(generator(THETA, 0), 2.0, 2, 2, "heat-eps", 1)


def test_triebel_p2_is_plancherel():
    x = random_qelement(np.random.default_rng(1), THETA, deg=4, terms=8) + monomial(THETA, (0, 0), 1.0)
    ks, table = block_coefficients(x)
    ref = abs(x.mean()) ** 2 + sum(2 ** (2 * k * 0.5) * np.sum(np.abs(x.vals * row) ** 2)
                                   for k, row in zip(ks, table))
    assert abs(triebel_norm(x, 0.5, 2).value - math.sqrt(ref)) < 1e-10
    # F^{0,c}_2 equals B^0_{2,2}
    assert abs(triebel_norm(x, 0.0, 2).value - besov_norm(x, 0.0, 2, 2).value) < 1e-10


def test_triebel_single_frequency():
    x = monomial(THETA, (4, 0))
    for p in (1, 2, 3):
        assert abs(triebel_norm(x, 0.5, p, ctrl=LpControl(levels=(4,))).value - 2.0) < 1e-3


def test_gram_element_is_positive_and_matches_square():
    x = random_qelement(np.random.default_rng(2), THETA)
    s = gram_element(x, np.ones((1, len(x))), np.ones(1))
    from qtorus.algebra import adjoint
    xx = adjoint(x) * x
    for m, c in xx.coeffs.items():
        assert abs(s.coefficient(m) - c) < 1e-12
    r = gram_element(x, np.ones((1, len(x))), np.ones(1), side="row")
    for m, c in (x * adjoint(x)).coeffs.items():
        assert abs(r.coefficient(m) - c) < 1e-12


def test_triebel_poisson_p2_oracle():
    x = monomial(THETA, (1, 1), 1.0) + monomial(THETA, (0, 2), 0.5) + monomial(THETA, (0, 0), 0.25)
    grid = QuadratureGrid(n_points=160, refine=False)
    got = triebel_norm_poisson(x, 0.5, 2, 1, grid).value
    f = x.freqs.astype(float)
    r = np.sqrt(np.sum(f ** 2, axis=1))
    tot = 0.0
    for c, rr in zip(np.abs(x.vals), r):
        if rr > 0:
            tot += c ** 2 * quad(lambda e: e ** 1.0 * (2 * math.pi * rr) ** 2 * math.exp(-4 * math.pi * e * rr) / e,
                                 0, 1, epsabs=1e-14)[0]
    assert abs(got - (0.25 + math.sqrt(tot))) < 1e-6


def test_hardy_equals_circular_square_function():
    x = monomial(THETA, (1, 1), 1.0) + monomial(THETA, (0, 0), 0.5)
    h = hardy_norm(x, 2).value
    t = triebel_norm_poisson(x, 0.0, 2, 1, kind="circular-poisson").value
    assert h == t and h > 0.5


def test_lq_aggregate():
    assert lq_aggregate([3, 4], 2) == 5
    assert lq_aggregate([3, 4], math.inf) == 4
