"""Fourier multipliers ``x(m) -> phi(m) x(m)`` and the concrete families used
throughout: derivatives, potentials, translations, differences, Fejer means,
Poisson and heat semigroups (with their eps- and r-derivatives).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import QElement

__all__ = [
    "Symbol",
    "DomainError",
    "apply",
    "symbol_values",
    "derivative",
    "derivative_symbol",
    "laplacian",
    "bessel",
    "bessel_symbol",
    "riesz",
    "riesz_symbol",
    "strip_mean",
    "translate",
    "translate_symbol",
    "difference",
    "difference_symbol",
    "fejer",
    "fejer_symbol",
    "semigroup",
    "semigroup_symbol",
    "circular_semigroup",
    "circular_semigroup_symbol",
    "circular_coefficients",
    "parse_symbol",
]


class DomainError(ValueError):
    """A multiplier was applied outside the frequencies it is defined on."""


@dataclass(frozen=True)
class Symbol:
    """A function on ``Z^d`` evaluated on whole frequency arrays.

    ``rule`` maps an ``(s, d)`` integer array to ``s`` complex values.
    ``domain`` optionally maps the same array to a boolean mask of admissible
    rows; ``domain_text`` describes it in error messages.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    name: str = "symbol"
    domain: Callable[[np.ndarray], np.ndarray] | None = None
    domain_text: str = ""

    def __call__(self, m) -> complex:
        arr = np.atleast_2d(np.asarray(m, dtype=np.int64))
        return complex(self.evaluate(arr)[0])

    def evaluate(self, freqs: np.ndarray) -> np.ndarray:
        freqs = np.asarray(freqs, dtype=np.int64)
        if self.domain is not None and freqs.shape[0]:
            ok = np.asarray(self.domain(freqs), dtype=bool)
            if not np.all(ok):
                bad = tuple(int(v) for v in freqs[np.argmin(ok)])
                raise DomainError(f"{self.name} is not defined at m={bad} ({self.domain_text})")
        out = np.asarray(self.rule(freqs), dtype=complex)
        return np.broadcast_to(out, (freqs.shape[0],)).copy()

    def __mul__(self, other: "Symbol") -> "Symbol":
        if not isinstance(other, Symbol):
            return NotImplemented
        doms = [s for s in (self, other) if s.domain is not None]

        def dom(f):
            mask = np.ones(f.shape[0], dtype=bool)
            for s in doms:
                mask &= np.asarray(s.domain(f), dtype=bool)
            return mask

        return Symbol(
            lambda f: self.rule(f) * other.rule(f),
            f"{self.name}*{other.name}",
            dom if doms else None,
            "; ".join(s.domain_text for s in doms),
        )

    @staticmethod
    def pointwise(fn: Callable, name: str = "symbol") -> "Symbol":
        """Wrap a scalar ``fn(tuple) -> complex``."""
        return Symbol(lambda f: np.array([fn(tuple(int(v) for v in row)) for row in f], dtype=complex), name)

    @staticmethod
    def table(values: dict, default: complex = 0.0, name: str = "table") -> "Symbol":
        """Finitely many explicit values, ``default`` elsewhere."""
        lut = {tuple(int(v) for v in k): complex(c) for k, c in values.items()}
        return Symbol(
            lambda f: np.array([lut.get(tuple(int(v) for v in row), default) for row in f], dtype=complex),
            name,
        )


def _nonzero(f: np.ndarray) -> np.ndarray:
    return np.any(f != 0, axis=1)


def _radius(f: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(f.astype(float) ** 2, axis=1))


def symbol_values(phi: Symbol, x: QElement) -> np.ndarray:
    return phi.evaluate(x.freqs)


def apply(phi: Symbol, x: QElement) -> QElement:
    """``M_phi x``."""
    return x.with_values(x.vals * phi.evaluate(x.freqs))


# --------------------------------------------------------------- derivatives
def derivative_symbol(mu: Sequence[int]) -> Symbol:
    mu = np.asarray(mu, dtype=np.int64)
    if np.any(mu < 0):
        raise ValueError("derivative orders must be nonnegative")

    def rule(f):
        out = np.ones(f.shape[0], dtype=complex)
        for j, e in enumerate(mu):
            if e:
                out *= (2j * math.pi * f[:, j]) ** int(e)
        return out

    return Symbol(rule, f"D^{tuple(int(v) for v in mu)}")


def derivative(x: QElement, mu: Sequence[int]) -> QElement:
    """``D^mu x``; the coefficient at ``m`` picks up ``prod_j (2 pi i m_j)^{mu_j}``."""
    if len(mu) != x.d:
        raise ValueError(f"mu has length {len(mu)} but d={x.d}")
    return apply(derivative_symbol(mu), x)


def laplacian(x: QElement) -> QElement:
    return apply(Symbol(lambda f: -4.0 * math.pi ** 2 * np.sum(f.astype(float) ** 2, axis=1), "laplacian"), x)


# ---------------------------------------------------------------- potentials
def bessel_symbol(alpha: float) -> Symbol:
    a = float(alpha)
    return Symbol(lambda f: np.exp(0.5 * a * np.log1p(np.sum(f.astype(float) ** 2, axis=1))), f"J^{a}")


def riesz_symbol(alpha: float) -> Symbol:
    a = float(alpha)

    def rule(f):
        r2 = np.sum(f.astype(float) ** 2, axis=1)
        out = np.zeros(f.shape[0])
        nz = r2 > 0
        out[nz] = np.exp(0.5 * a * np.log(r2[nz]))
        return out

    return Symbol(rule, f"I^{a}", _nonzero, "the Riesz potential needs a zero mean; use strip_mean")


def bessel(x: QElement, alpha: float) -> QElement:
    return apply(bessel_symbol(alpha), x)


def riesz(x: QElement, alpha: float) -> QElement:
    return apply(riesz_symbol(alpha), x)


def strip_mean(x: QElement):
    """Return ``(x(0), x - x(0))``."""
    mask = _nonzero(x.freqs)
    mean = x.mean()
    rest = QElement.from_arrays(x.theta, x.freqs[mask], x.vals[mask], x.prune_tol, aggregate=False)
    return mean, rest


# ------------------------------------------------- translations, differences
def _dot(f: np.ndarray, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (f.shape[1],):
        raise ValueError(f"translation vector must have length {f.shape[1]}")
    return f.astype(float) @ u


def translate_symbol(u) -> Symbol:
    return Symbol(lambda f: np.exp(2j * math.pi * _dot(f, u)), "T_u")


def difference_symbol(u, k: int = 1) -> Symbol:
    if int(k) != k or k < 1:
        raise ValueError("difference order k must be an integer >= 1")
    k = int(k)
    return Symbol(lambda f: np.expm1(2j * math.pi * _dot(f, u)) ** k, f"Delta_u^{k}")


def translate(x: QElement, u) -> QElement:
    return apply(translate_symbol(u), x)


def difference(x: QElement, u, k: int = 1) -> QElement:
    """``Delta_u^k x`` with symbol ``(e^{2 pi i u.m} - 1)^k``."""
    return apply(difference_symbol(u, k), x)


# --------------------------------------------------------------------- Fejer
def fejer_symbol(N: int) -> Symbol:
    if N < 0:
        raise ValueError("N must be >= 0")

    def rule(f):
        w = 1.0 - np.abs(f).astype(float) / (N + 1)
        return np.where(np.all(np.abs(f) <= N, axis=1), np.prod(w, axis=1), 0.0)

    return Symbol(rule, f"Fejer_{N}")


def fejer(x: QElement, N: int) -> QElement:
    return apply(fejer_symbol(N), x)


# ---------------------------------------------------------------- semigroups
def semigroup_symbol(kind: str, eps: float, k: int = 0) -> Symbol:
    """Symbol of ``eps^0 J^k_eps`` applied to the Poisson or heat semigroup at ``eps``.

    Poisson: ``(-sgn(k) 2 pi |m|)^k e^{-2 pi eps |m|}``;
    heat: ``(-sgn(k) 4 pi^2 |m|^2)^k e^{-4 pi^2 eps |m|^2}``.
    For ``k != 0`` the mean is dropped.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = int(k)
    sgn = float(np.sign(k))

    if kind == "poisson":
        def rule(f):
            r = _radius(f)
            base = np.exp(-2.0 * math.pi * eps * r)
            if k == 0:
                return base
            out = np.zeros_like(r)
            nz = r > 0
            out[nz] = (-sgn * 2.0 * math.pi * r[nz]) ** k * base[nz]
            return out
    elif kind == "heat":
        def rule(f):
            r2 = np.sum(f.astype(float) ** 2, axis=1)
            base = np.exp(-4.0 * math.pi ** 2 * eps * r2)
            if k == 0:
                return base
            out = np.zeros_like(r2)
            nz = r2 > 0
            out[nz] = (-sgn * 4.0 * math.pi ** 2 * r2[nz]) ** k * base[nz]
            return out
    else:
        raise ValueError(f"unknown semigroup kind {kind!r}; expected 'poisson' or 'heat'")

    dom = _nonzero if k < 0 else None
    return Symbol(rule, f"{kind}(eps={eps},k={k})", dom,
                  "negative k integrates and needs a zero mean")


def semigroup(x: QElement, kind: str, eps: float, k: int = 0) -> QElement:
    return apply(semigroup_symbol(kind, eps, k), x)


def circular_coefficients(a: np.ndarray, k: int) -> np.ndarray:
    """``a (a-1) ... (a-k+1)`` for ``k >= 0`` and ``1/((a+1) ... (a-k))`` for ``k < 0``."""
    a = np.asarray(a, dtype=float)
    out = np.ones_like(a)
    if k >= 0:
        for i in range(k):
            out *= a - i
    else:
        for i in range(1, -k + 1):
            out /= a + i
    return out


def circular_semigroup_symbol(kind: str, r: float, k: int = 0) -> Symbol:
    """``J^k_r P_r`` (``|m|``) or ``J^k_r W_r`` (``|m|^2``) as a symbol in ``m``."""
    if not (0.0 <= r < 1.0):
        raise ValueError("r must lie in [0, 1)")
    k = int(k)
    if kind == "poisson":
        expo = _radius
    elif kind == "heat":
        expo = lambda f: np.sum(f.astype(float) ** 2, axis=1)  # noqa: E731
    else:
        raise ValueError(f"unknown semigroup kind {kind!r}; expected 'poisson' or 'heat'")

    def rule(f):
        a = expo(f)
        c = circular_coefficients(a, k)
        e = a - k
        with np.errstate(divide="ignore", invalid="ignore"):
            pw = np.where(e == 0, 1.0, np.power(r, np.where(e == 0, 1.0, e)))
        return np.where(c == 0, 0.0, c * pw)

    dom = None
    text = ""
    if kind == "poisson" and k >= 1:
        dom = lambda f: _radius(f) >= k  # noqa: E731
        text = f"frequencies with |m| < {k} must be removed first (x_k = x - sum_{{|m|<k}} x(m) U^m)"
    return Symbol(rule, f"circular-{kind}(r={r},k={k})", dom, text)


def circular_semigroup(x: QElement, kind: str, r: float, k: int = 0) -> QElement:
    return apply(circular_semigroup_symbol(kind, r, k), x)


# ------------------------------------------------------------- named specs
def parse_symbol(spec: str, d: int) -> Symbol:
    """Build a symbol from ``"name:key=value:..."``.

    Names: ``bessel:alpha``, ``riesz:alpha``, ``poisson:eps:k``, ``heat:eps:k``,
    ``circular-poisson:r:k``, ``circular-heat:r:k``, ``diff:u:k``,
    ``translate:u``, ``fejer:N``, ``deriv:mu``.  Vectors are comma separated.
    """
    parts = spec.split(":")
    name, kv = parts[0].strip(), {}
    for item in parts[1:]:
        if "=" not in item:
            raise ValueError(f"bad multiplier parameter {item!r} in {spec!r}")
        key, val = item.split("=", 1)
        kv[key.strip()] = val.strip()

    def vec(key):
        v = [float(t) for t in kv[key].split(",")]
        if len(v) != d:
            raise ValueError(f"{key} needs {d} components")
        return v

    try:
        if name == "bessel":
            return bessel_symbol(float(kv["alpha"]))
        if name == "riesz":
            return riesz_symbol(float(kv["alpha"]))
        if name in ("poisson", "heat"):
            return semigroup_symbol(name, float(kv["eps"]), int(kv.get("k", 0)))
        if name in ("circular-poisson", "circular-heat"):
            return circular_semigroup_symbol(name.split("-")[1], float(kv["r"]), int(kv.get("k", 0)))
        if name == "diff":
            return difference_symbol(vec("u"), int(kv.get("k", 1)))
        if name == "translate":
            return translate_symbol(vec("u"))
        if name == "fejer":
            return fejer_symbol(int(kv["N"]))
        if name == "deriv":
            return derivative_symbol([int(round(v)) for v in vec("mu")])
    except KeyError as exc:
        raise ValueError(f"multiplier {name!r} is missing parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown multiplier {name!r}")
