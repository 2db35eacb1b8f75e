"""Exact arithmetic on quantum-torus trigonometric polynomials.

Elements are finite sums ``sum_m c_m U^m`` with ``U^m = U_1^{m_1} ... U_d^{m_d}``.
The generators satisfy ``U_k U_j = exp(2 pi i theta_{kj}) U_j U_k``.  Normal
ordering gives

    U^m U^n = exp(i sigma(m, n)) U^{m+n},
    sigma(m, n) = 2 pi sum_{k > j} theta_{kj} m_k n_j,

and the adjoint ``(U^m)^* = exp(i rho(m)) U^{-m}`` with ``rho(m) = sigma(m, m)``.
"""
from __future__ import annotations

import json
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ThetaMatrix",
    "QElement",
    "ThetaMismatchError",
    "monomial",
    "generator",
    "one",
    "adjoint_phase",
    "linear_combine",
    "phase",
    "phase_matrix",
    "multiply",
    "adjoint",
    "trace",
    "inner_product",
    "l2_norm",
    "element_to_dict",
    "element_from_dict",
    "element_to_json",
    "element_from_json",
]


class ThetaMismatchError(ValueError):
    """Raised when two elements built on different deformation matrices meet."""


class ThetaMatrix:
    """Real skew-symmetric deformation matrix.

    ``entries[k, j]`` is the angle in ``U_k U_j = e^{2 pi i theta_kj} U_j U_k``.
    """

    __slots__ = ("_entries", "_lower", "_tilde")

    def __init__(self, entries, *, atol: float = 1e-14):
        a = np.array(entries, dtype=float)
        if a.ndim == 0:
            raise ValueError("theta must be a d x d matrix; use ThetaMatrix.from_scalar")
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"theta must be square with d >= 1, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("theta entries must be finite")
        if np.max(np.abs(a + a.T), initial=0.0) > atol:
            raise ValueError("theta must be skew-symmetric")
        a = 0.5 * (a - a.T)
        a.setflags(write=False)
        self._entries = a
        lower = np.tril(a, -1)
        lower.setflags(write=False)
        self._lower = lower
        tilde = -2.0 * math.pi * np.triu(a, 1)
        tilde.setflags(write=False)
        self._tilde = tilde

    @classmethod
    def from_scalar(cls, t: float, d: int = 2) -> "ThetaMatrix":
        """Every pair k > j gets angle ``t``, so ``U_2 U_1 = e^{2 pi i t} U_1 U_2``."""
        a = np.zeros((d, d))
        lo = np.tril_indices(d, -1)
        a[lo] = t
        return cls(a - a.T)

    @classmethod
    def zero(cls, d: int) -> "ThetaMatrix":
        return cls(np.zeros((d, d)))

    @property
    def d(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def lower(self) -> np.ndarray:
        """Strictly lower part, the matrix L with sigma(m, n) = 2 pi m L n."""
        return self._lower

    @property
    def tilde(self) -> np.ndarray:
        """Upper-triangular phase matrix used by the matrix representation."""
        return self._tilde

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThetaMatrix):
            return NotImplemented
        return self._entries.shape == other._entries.shape and bool(
            np.array_equal(self._entries, other._entries)
        )

    def __hash__(self) -> int:
        return hash((self.d, self._entries.tobytes()))

    def __repr__(self) -> str:
        return f"ThetaMatrix({self._entries.tolist()!r})"


def phase_matrix(theta: ThetaMatrix, m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """sigma(m_i, n_j) for all rows of ``m`` (a x d) and ``n`` (b x d)."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    return 2.0 * math.pi * (m @ theta.lower) @ n.T


def phase(theta: ThetaMatrix, m: Sequence[int], n: Sequence[int]) -> float:
    """Normal-ordering phase ``sigma(m, n)``, unreduced.

    >>> th = ThetaMatrix.from_scalar(0.25)
    >>> round(phase(th, (0, 1), (1, 0)) / (2 * math.pi), 12)
    0.25
    """
    m = _as_index(m, theta.d)
    n = _as_index(n, theta.d)
    return float(phase_matrix(theta, m[None, :], n[None, :])[0, 0])


def _as_index(m, d: int) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 1 or a.shape[0] != d:
        raise ValueError(f"multi-index {tuple(np.atleast_1d(a).tolist())} does not have length d={d}")
    if a.dtype.kind == "f":
        if not np.all(a == np.round(a)):
            raise ValueError(f"multi-index {a.tolist()} must be integral")
    elif a.dtype.kind not in "iu":
        raise ValueError("multi-index must be integral")
    return a.astype(np.int64)


def _lex_order(freqs: np.ndarray) -> np.ndarray:
    if freqs.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    # np.lexsort treats the last key as primary
    return np.lexsort(freqs.T[::-1])


def _aggregate(freqs: np.ndarray, vals: np.ndarray):
    """Sum values sharing a frequency; returns lexicographically sorted arrays."""
    if freqs.shape[0] == 0:
        return freqs.reshape(0, freqs.shape[1]), vals.reshape(0)
    uniq, inverse = np.unique(freqs, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    re = np.bincount(inverse, weights=vals.real, minlength=uniq.shape[0])
    im = np.bincount(inverse, weights=vals.imag, minlength=uniq.shape[0])
    # np.unique on axis 0 already sorts rows lexicographically
    return uniq.astype(np.int64), re + 1j * im


class QElement:
    """A polynomial in the quantum-torus generators.

    Parameters
    ----------
    theta : ThetaMatrix
    coeffs : mapping or None
        Frequency tuple to complex coefficient.
    prune_tol : float
        Coefficients with modulus ``<= prune_tol`` are dropped; the default
        keeps everything except exact zeros.

    Notes
    -----
    Support is stored as an ``(s, d)`` integer array sorted lexicographically
    with a parallel complex array.  Instances are immutable.
    """

    __slots__ = ("_theta", "_freqs", "_vals", "_prune_tol")

    def __init__(self, theta: ThetaMatrix, coeffs: Mapping | None = None, prune_tol: float = 0.0):
        if not isinstance(theta, ThetaMatrix):
            raise TypeError("theta must be a ThetaMatrix")
        d = theta.d
        if coeffs:
            keys = [tuple(_as_index(k, d).tolist()) for k in coeffs.keys()]
            freqs = np.array(keys, dtype=np.int64).reshape(-1, d)
            vals = np.array([complex(v) for v in coeffs.values()], dtype=complex)
        else:
            freqs = np.zeros((0, d), dtype=np.int64)
            vals = np.zeros(0, dtype=complex)
        self._init_arrays(theta, freqs, vals, prune_tol, aggregate=True)

    @classmethod
    def from_arrays(cls, theta: ThetaMatrix, freqs, vals, prune_tol: float = 0.0,
                    aggregate: bool = True) -> "QElement":
        """Build from a frequency array and a value array.

        Duplicate frequencies are summed when ``aggregate`` is true; pass
        ``aggregate=False`` only for arrays already unique and sorted.
        """
        obj = cls.__new__(cls)
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, theta.d)
        vals = np.asarray(vals, dtype=complex).reshape(-1)
        if freqs.shape[0] != vals.shape[0]:
            raise ValueError("frequency and value arrays differ in length")
        obj._init_arrays(theta, freqs, vals, prune_tol, aggregate)
        return obj

    def _init_arrays(self, theta, freqs, vals, prune_tol, aggregate):
        if prune_tol < 0 or not math.isfinite(prune_tol):
            raise ValueError("prune_tol must be a finite nonnegative number")
        if aggregate:
            freqs, vals = _aggregate(freqs, vals)
        keep = np.abs(vals) > prune_tol
        if prune_tol == 0.0:
            keep = vals != 0
        freqs = np.ascontiguousarray(freqs[keep])
        vals = np.ascontiguousarray(vals[keep])
        freqs.setflags(write=False)
        vals.setflags(write=False)
        self._theta = theta
        self._freqs = freqs
        self._vals = vals
        self._prune_tol = float(prune_tol)

    # ------------------------------------------------------------------ views
    @property
    def theta(self) -> ThetaMatrix:
        return self._theta

    @property
    def d(self) -> int:
        return self._theta.d

    @property
    def prune_tol(self) -> float:
        return self._prune_tol

    @property
    def freqs(self) -> np.ndarray:
        return self._freqs

    @property
    def vals(self) -> np.ndarray:
        return self._vals

    @property
    def coeffs(self) -> dict:
        return {tuple(int(v) for v in f): complex(c) for f, c in zip(self._freqs, self._vals)}

    @property
    def support(self) -> list:
        return [tuple(int(v) for v in f) for f in self._freqs]

    def __len__(self) -> int:
        return self._vals.shape[0]

    def is_zero(self) -> bool:
        return self._vals.shape[0] == 0

    def coefficient(self, m) -> complex:
        m = _as_index(m, self.d)
        hit = np.nonzero(np.all(self._freqs == m, axis=1))[0]
        return complex(self._vals[hit[0]]) if hit.size else 0j

    def mean(self) -> complex:
        return self.coefficient(np.zeros(self.d, dtype=np.int64))

    def degree(self) -> int:
        """Largest ``max_j |m_j|`` over the support (0 for the empty element)."""
        if self.is_zero():
            return 0
        return int(np.max(np.abs(self._freqs)))

    def with_values(self, vals) -> "QElement":
        """Same support, new coefficients (zeros are pruned)."""
        return QElement.from_arrays(self._theta, self._freqs, vals, self._prune_tol, aggregate=False)

    # ------------------------------------------------------------- operators
    def _check(self, other: "QElement"):
        if not isinstance(other, QElement):
            raise TypeError("expected a QElement")
        if other._theta != self._theta:
            raise ThetaMismatchError("elements are built on different theta matrices")

    def __add__(self, other):
        if not isinstance(other, QElement):
            return NotImplemented
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other):
        if not isinstance(other, QElement):
            return NotImplemented
        return linear_combine([(1, self), (-1, other)])

    def __neg__(self):
        return self.with_values(-self._vals)

    def __mul__(self, other):
        if isinstance(other, QElement):
            return multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_values(self._vals * complex(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_values(self._vals * complex(other))
        return NotImplemented

    def __matmul__(self, other):
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QElement):
            return NotImplemented
        return (
            self._theta == other._theta
            and np.array_equal(self._freqs, other._freqs)
            and np.array_equal(self._vals, other._vals)
        )

    __hash__ = None

    def __repr__(self) -> str:
        terms = ", ".join(f"{f}: {c!r}" for f, c in self.coeffs.items())
        return f"QElement(d={self.d}, {{{terms}}})"


def monomial(theta: ThetaMatrix, m, c: complex = 1.0, prune_tol: float = 0.0) -> QElement:
    """``c * U^m``."""
    m = _as_index(m, theta.d)
    return QElement.from_arrays(theta, m[None, :], [c], prune_tol)


def generator(theta: ThetaMatrix, j: int) -> QElement:
    """The unitary ``U_j`` (0-based ``j``)."""
    m = np.zeros(theta.d, dtype=np.int64)
    m[j] = 1
    return monomial(theta, m)


def one(theta: ThetaMatrix) -> QElement:
    return monomial(theta, np.zeros(theta.d, dtype=np.int64))


def linear_combine(terms: Iterable) -> QElement:
    """Coefficientwise ``sum_i a_i x_i``; pruning follows the first element."""
    terms = list(terms)
    if not terms:
        raise ValueError("linear_combine needs at least one term")
    first = terms[0][1]
    for _, x in terms[1:]:
        first._check(x)
    freqs = np.concatenate([x.freqs for _, x in terms], axis=0)
    vals = np.concatenate([complex(a) * x.vals for a, x in terms])
    return QElement.from_arrays(first.theta, freqs, vals, first.prune_tol)


def multiply(x: QElement, y: QElement) -> QElement:
    """Twisted product ``z(k) = sum_{m+n=k} x(m) y(n) e^{i sigma(m,n)}``."""
    x._check(y)
    if x.is_zero() or y.is_zero():
        return QElement.from_arrays(x.theta, np.zeros((0, x.d)), [], x.prune_tol)
    sig = phase_matrix(x.theta, x.freqs, y.freqs)
    vals = (x.vals[:, None] * y.vals[None, :]) * np.exp(1j * sig)
    freqs = (x.freqs[:, None, :] + y.freqs[None, :, :]).reshape(-1, x.d)
    return QElement.from_arrays(x.theta, freqs, vals.reshape(-1), x.prune_tol)


def adjoint_phase(theta: ThetaMatrix, freqs: np.ndarray) -> np.ndarray:
    """rho(m) for each row, with (U^m)^* = e^{i rho(m)} U^{-m}."""
    f = np.asarray(freqs, dtype=float)
    return 2.0 * math.pi * np.einsum("ij,jk,ik->i", f, theta.lower, f)


def adjoint(x: QElement) -> QElement:
    """Involution: coefficient of ``U^{-m}`` is ``conj(x(m)) e^{i rho(m)}``."""
    vals = np.conj(x.vals) * np.exp(1j * adjoint_phase(x.theta, x.freqs))
    return QElement.from_arrays(x.theta, -x.freqs, vals, x.prune_tol)


def trace(x: QElement) -> complex:
    """The tracial state: coefficient of ``U^0``."""
    return x.mean()


def inner_product(x: QElement, y: QElement) -> complex:
    """``tau(y^* x) = sum_m x(m) conj(y(m))``."""
    x._check(y)
    if x.is_zero() or y.is_zero():
        return 0j
    both = np.concatenate([x.freqs, y.freqs], axis=0)
    _, inv = np.unique(both, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    ix, iy = inv[: len(x)], inv[len(x):]
    lookup = dict(zip(iy.tolist(), range(len(iy))))
    total = 0j
    for a, key in enumerate(ix.tolist()):
        b = lookup.get(key)
        if b is not None:
            total += x.vals[a] * np.conj(y.vals[b])
    return complex(total)


def l2_norm(x: QElement) -> float:
    return float(np.sqrt(np.sum(np.abs(x.vals) ** 2)))


# ------------------------------------------------------------ serialization
def element_to_dict(x: QElement) -> dict:
    return {
        "d": x.d,
        "theta": [[float(v) for v in row] for row in x.theta.entries],
        "coeffs": [
            {"m": [int(v) for v in f], "re": float(c.real), "im": float(c.imag)}
            for f, c in zip(x.freqs, x.vals)
        ],
    }


def element_from_dict(obj: Mapping, prune_tol: float = 0.0) -> QElement:
    try:
        d = int(obj["d"])
        theta = ThetaMatrix(obj["theta"])
        rows = obj["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed element document: {exc}") from exc
    if theta.d != d:
        raise ValueError(f"element declares d={d} but theta is {theta.d}x{theta.d}")
    freqs = np.array([r["m"] for r in rows], dtype=np.int64).reshape(-1, d)
    vals = np.array([complex(float(r["re"]), float(r.get("im", 0.0))) for r in rows], dtype=complex)
    return QElement.from_arrays(theta, freqs, vals, prune_tol)


def element_to_json(x: QElement, indent: int | None = 1) -> str:
    # json writes floats with repr, which round-trips doubles exactly
    return json.dumps(element_to_dict(x), indent=indent)


def element_from_json(text: str, prune_tol: float = 0.0) -> QElement:
    return element_from_dict(json.loads(text), prune_tol)
