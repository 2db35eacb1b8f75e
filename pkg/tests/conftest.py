from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from qtorus.algebra import QElement, ThetaMatrix

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

GOLDEN = 0.6180339887498949

# pass/fail lines from test_acceptance.py, repeated at the end of the run
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def theta2() -> ThetaMatrix:
    return ThetaMatrix.from_scalar(GOLDEN, 2)


def random_qelement(rng: np.random.Generator, theta: ThetaMatrix, deg: int = 2, terms: int = 6) -> QElement:
    d = theta.d
    freqs = rng.integers(-deg, deg + 1, size=(terms, d))
    vals = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return QElement.from_arrays(theta, freqs, vals)


@st.composite
def thetas(draw, d=None):
    d = d if d is not None else draw(st.integers(1, 3))
    lo = np.tril_indices(d, -1)
    vals = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=len(lo[0]), max_size=len(lo[0])))
    a = np.zeros((d, d))
    a[lo] = vals
    return ThetaMatrix(a - a.T)


@st.composite
def elements(draw, theta=None, deg=2, max_terms=5):
    theta = theta if theta is not None else draw(thetas())
    d = theta.d
    n = draw(st.integers(0, max_terms))
    freqs = draw(st.lists(st.tuples(*[st.integers(-deg, deg)] * d), min_size=n, max_size=n))
    cs = draw(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                       min_size=n, max_size=n))
    return QElement(theta, dict(zip(freqs, cs)))
