"""Numerics on quantum-torus trigonometric polynomials.

Exact algebra on finitely supported elements, matrix-representation L_p norms,
Fourier multipliers, and Sobolev, Besov and Triebel-Lizorkin norms with a
verification harness for the inequalities relating them.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    QElement,
    ThetaMatrix,
    adjoint,
    element_from_json,
    element_to_json,
    generator,
    monomial,
    multiply,
    one,
    trace,
)
from .matrix_rep import LpControl, lp_norm  # noqa: E402

__all__ = [
    "__version__",
    "QElement",
    "ThetaMatrix",
    "adjoint",
    "element_from_json",
    "element_to_json",
    "generator",
    "monomial",
    "multiply",
    "one",
    "trace",
    "LpControl",
    "lp_norm",
]
