from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtorus.algebra import ThetaMatrix, adjoint, monomial
from qtorus.matrix_rep import (
    LpControl,
    MultiplierStack,
    TruncationWindow,
    WindowBudgetError,
    lp_norm,
    schatten_norm,
    singular_values,
    to_matrix,
    truncated_l2_closed_form,
)
from qtorus.verify import scalar_lp_norm

from conftest import GOLDEN, elements, random_qelement


def test_window_enumeration_is_lexicographic():
    w = TruncationWindow(2, 1)
    assert w.index_set.tolist()[:3] == [[-1, -1], [-1, 0], [-1, 1]]
    assert np.array_equal(w.index_of(w.index_set), np.arange(w.size))
    assert w.contains(np.array([[1, -1]]))[0] and not w.contains(np.array([[2, 0]]))[0]


def test_entries_match_left_regular_action(theta2):
    """[x]_{mn} is the coefficient of U^m in x U^n."""
    rng = np.random.default_rng(1)
    x = random_qelement(rng, theta2, deg=2)
    N = 3
    a = to_matrix(x, N)
    W = a.window.index_set
    for j in rng.choice(W.shape[0], 6, replace=False):
        col = x * monomial(theta2, W[j])
        for i in range(W.shape[0]):
            assert abs(a.entries[i, j] - col.coefficient(W[i])) < 1e-13


def test_products_agree_away_from_the_edge(theta2):
    rng = np.random.default_rng(2)
    x, y = random_qelement(rng, theta2, 1), random_qelement(rng, theta2, 1)
    N = 4
    ax, ay, axy = (to_matrix(z, N) for z in (x, y, x * y))
    inner = np.all(np.abs(ax.window.index_set) <= N - y.degree(), axis=1)
    lhs = (ax.entries @ ay.entries)[:, inner]
    assert np.max(np.abs(lhs - axy.entries[:, inner])) < 1e-12


def test_adjoint_is_conjugate_transpose(theta2):
    x = random_qelement(np.random.default_rng(4), theta2)
    assert np.max(np.abs(to_matrix(adjoint(x), 3).entries - to_matrix(x, 3).entries.conj().T)) < 1e-13


@given(elements(ThetaMatrix.from_scalar(GOLDEN, 2)), st.integers(1, 4))
def test_truncated_l2_closed_form(x, N):
    a = to_matrix(x, N)
    frob = math.sqrt(np.sum(np.abs(a.entries) ** 2) / a.window.size)
    assert abs(frob - truncated_l2_closed_form(x, N)) < 1e-12 * (1 + frob)


def test_schatten_norms_of_unitary_slices():
    a = np.diag(np.exp(1j * np.arange(5)))
    for p in (1, 2, 4, math.inf):
        assert abs(schatten_norm(a, p, normalized=True) - 1.0) < 1e-14
    assert abs(schatten_norm(a, 2, normalized=False) - math.sqrt(5)) < 1e-14
    b = np.random.default_rng(0).normal(size=(6, 6))
    assert np.allclose(singular_values(b), np.linalg.svd(b, compute_uv=False), atol=1e-12)


@pytest.mark.parametrize("p", [1, 2, 4, "inf"])
@pytest.mark.parametrize("m", [(1, 0), (2, -1), (0, 3)])
def test_monomials_have_unit_norm(theta2, p, m):
    res = lp_norm(monomial(theta2, m), p)
    assert abs(res.value - 1.0) < 1e-3


def test_p2_calibration_and_homogeneity(theta2):
    x = random_qelement(np.random.default_rng(5), theta2)
    res = lp_norm(x, 2)
    exact = float(np.sqrt(np.sum(np.abs(x.vals) ** 2)))
    assert abs(res.value - exact) < 1e-10 * exact
    assert res.p2_calibration_error < 1e-10
    scaled = lp_norm(x * (2 - 1j), 1, LpControl(levels=(3,)))
    base = lp_norm(x, 1, LpControl(levels=(3,)))
    assert abs(scaled.value - math.sqrt(5) * base.value) < 1e-10


def test_even_p_is_exact_in_commutative_case():
    theta = ThetaMatrix.zero(1)
    x = random_qelement(np.random.default_rng(6), theta, deg=3, terms=5)
    got = lp_norm(x, 4, LpControl(levels=(8,))).value
    assert abs(got - scalar_lp_norm(x, 4)) < 1e-10


def test_norms_are_monotone_in_p(theta2):
    x = random_qelement(np.random.default_rng(7), theta2)
    st_ = MultiplierStack(x, 3)
    vals = st_.norms(None, [1, 2, 4, math.inf])
    assert vals[1.0] <= vals[2.0] * (1 + 1e-2) <= vals[4.0] * (1 + 1e-2)
    assert vals[4.0] <= vals[math.inf] * 1.05


def test_budget_is_enforced(theta2):
    with pytest.raises(WindowBudgetError):
        to_matrix(monomial(theta2, (1, 1)), 40, max_size=100)


def test_zero_element(theta2):
    assert lp_norm(monomial(theta2, (0, 0), 0), 1).value == 0.0


@pytest.mark.parametrize("p", [1, 3])
def test_central_estimator_matches_scalar_oracle(p):
    th = ThetaMatrix.zero(1)
    x = random_qelement(np.random.default_rng(21), th, deg=6, terms=8)
    res = lp_norm(x, p, LpControl(levels=(96, 192), max_size=1000, estimator="central"))
    assert abs(res.value - scalar_lp_norm(x, p)) < 1e-4 * res.value
    assert res.p2_calibration_error < 1e-12


def test_central_estimator_on_monomials(theta2):
    ctrl = LpControl(levels=(4,), estimator="central")
    for p in (1, 3):
        assert abs(lp_norm(monomial(theta2, (2, -1)), p, ctrl).value - 1.0) < 1e-12


def test_unknown_estimator():
    with pytest.raises(ValueError):
        LpControl(estimator="median")
