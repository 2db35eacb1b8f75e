"""Norms of Sobolev, potential, Besov and Triebel-Lizorkin type.

Every quantity here is an L_p norm of one or more Fourier multipliers applied
to the same element.  :class:`NormContext` evaluates a whole matrix of symbols
at once: at ``p = 2`` through Plancherel, otherwise through the Schur-product
stack of :mod:`qtorus.matrix_rep`, built once per element.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import QElement, adjoint, adjoint_phase, monomial, phase_matrix
from .littlewood_paley import LPProfile, block_coefficients, get_profile
from .matrix_rep import LpControl, MultiplierStack, _parse_p, WindowBudgetError
from .multipliers import (
    bessel_symbol,
    circular_semigroup_symbol,
    derivative_symbol,
    riesz_symbol,
    semigroup_symbol,
    strip_mean,
)

__all__ = [
    "NormResult",
    "NormContext",
    "QuadratureGrid",
    "ConstraintError",
    "lq_aggregate",
    "lp_value",
    "sobolev_norm",
    "potential_norm",
    "riesz_potential_norm",
    "besov_norm",
    "besov_block_norms",
    "besov_from_blocks",
    "besov_norm_semigroup",
    "SemigroupProfile",
    "semigroup_profile",
    "gram_element",
    "positive_root_norm",
    "triebel_norm",
    "triebel_norm_poisson",
    "hardy_norm",
    "SEMIGROUP_KINDS",
]

SEMIGROUP_KINDS = ("poisson-eps", "heat-eps", "circular-poisson", "circular-heat")


class ConstraintError(ValueError):
    """A characterization was requested outside the parameter range where it holds."""


@dataclass
class NormResult:
    value: float
    breakdown: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "breakdown": self.breakdown, "diagnostics": self.diagnostics}


def lq_aggregate(values: Sequence[float], q: float) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0.0
    if math.isinf(q):
        return float(v.max())
    return float(np.sum(v ** q) ** (1.0 / q))


def _default_level(x: QElement, ctrl: LpControl) -> int:
    """Single window level used inside norm computations."""
    d = x.d
    N = int(ctrl.levels[-1]) if ctrl.levels is not None else max(2 * x.degree(), 2)
    while N > 0 and (2 * (N + d) + 1) ** d > ctrl.max_size:
        N -= 1
    return N


class NormContext:
    """Cached L_p evaluation of multipliers applied to one element.

    Parameters
    ----------
    x : QElement
    ctrl : LpControl, optional
        Only ``levels[-1]`` (or ``2 deg`` when absent), ``max_size`` and
        ``exact_p2`` are consulted: norm computations use one level.
    """

    def __init__(self, x: QElement, ctrl: LpControl | None = None):
        self.x = x
        self.ctrl = ctrl or LpControl()
        self._stack = None
        self.abs2 = np.abs(x.vals) ** 2

    @property
    def level(self) -> int:
        return _default_level(self.x, self.ctrl)

    def stack(self) -> MultiplierStack:
        if self._stack is None:
            self._stack = MultiplierStack(self.x, self.level, self.ctrl.max_size)
        return self._stack

    def norms(self, symbols: np.ndarray, ps: Sequence) -> np.ndarray:
        """``out[i, j] = ||M_{symbols[i]} x||_{ps[j]}``; ``symbols`` is (r, support)."""
        symbols = np.atleast_2d(np.asarray(symbols, dtype=complex))
        ps = [_parse_p(p) for p in ps]
        out = np.zeros((symbols.shape[0], len(ps)))
        if self.x.is_zero():
            return out
        need_matrix = [j for j, p in enumerate(ps) if not (p == 2.0 and self.ctrl.exact_p2)]
        for j, p in enumerate(ps):
            if j not in need_matrix:
                out[:, j] = np.sqrt(np.abs(symbols) ** 2 @ self.abs2)
        if need_matrix:
            st = self.stack()
            for i in range(symbols.shape[0]):
                spectra = st.squared_singular_values(symbols[i])
                for j in need_matrix:
                    out[i, j] = st._estimate(spectra, ps[j])[0]
        return out

    def norm(self, symbol_vals: np.ndarray | None, p) -> float:
        if symbol_vals is None:
            symbol_vals = np.ones(len(self.x))
        return float(self.norms(symbol_vals[None, :], [p])[0, 0])

    def diagnostics(self) -> dict:
        return {"N_level": self.level, "exact_p2": self.ctrl.exact_p2}


def _ctx(x: QElement, ctrl, ctx) -> NormContext:
    if ctx is not None:
        if ctx.x is not x and not (ctx.x == x):
            raise ValueError("norm context belongs to a different element")
        return ctx
    return NormContext(x, ctrl)


def lp_value(x: QElement, p, ctrl: LpControl | None = None, ctx: NormContext | None = None) -> float:
    return _ctx(x, ctrl, ctx).norm(None, p)


# --------------------------------------------------------------- Sobolev
def _multi_indices(d: int, order: int):
    for mu in itertools.product(range(order + 1), repeat=d):
        if sum(mu) == order:
            yield mu


def sobolev_norm(x: QElement, k: int, p, seminorm_only: bool = False,
                 ctrl: LpControl | None = None, ctx: NormContext | None = None) -> NormResult:
    """``(sum_{|mu| <= k} ||D^mu x||_p^p)^{1/p}``, or only ``|mu| = k`` for the seminorm."""
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    p = _parse_p(p)
    c = _ctx(x, ctrl, ctx)
    orders = [k] if seminorm_only else range(k + 1)
    mus = [mu for j in orders for mu in _multi_indices(x.d, j)]
    sym = np.array([derivative_symbol(mu).evaluate(x.freqs) for mu in mus]).reshape(len(mus), len(x))
    vals = c.norms(sym, [p])[:, 0]
    breakdown = {str(mu): float(v) for mu, v in zip(mus, vals)}
    return NormResult(lq_aggregate(vals, p), breakdown, c.diagnostics())


def potential_norm(x: QElement, alpha: float, p, ctrl=None, ctx=None) -> NormResult:
    """``||J^alpha x||_p``."""
    c = _ctx(x, ctrl, ctx)
    v = c.norm(bessel_symbol(alpha).evaluate(x.freqs), p)
    return NormResult(v, {"bessel": v}, c.diagnostics())


def riesz_potential_norm(x: QElement, alpha: float, p, ctrl=None, ctx=None) -> NormResult:
    """``(|x(0)|^p + ||I^alpha (x - x(0))||_p^p)^{1/p}``."""
    p = _parse_p(p)
    c = _ctx(x, ctrl, ctx)
    mean = abs(x.mean())
    nz = np.any(x.freqs != 0, axis=1)
    sym = np.zeros(len(x), dtype=complex)
    if np.any(nz):
        sym[nz] = riesz_symbol(alpha).evaluate(x.freqs[nz])
    v = c.norm(sym, p)
    return NormResult(lq_aggregate([mean, v], p), {"mean": mean, "riesz": v}, c.diagnostics())


# ------------------------------------------------------------------ Besov
def besov_block_norms(x: QElement, ps: Sequence, profile=None, ctrl=None, ctx=None):
    """``(ks, norms)`` with ``norms[i, j] = ||phi_k * x||_{ps[j]}`` for ``k = ks[i]``."""
    c = _ctx(x, ctrl, ctx)
    ks, table = block_coefficients(x, profile)
    if not ks:
        return ks, np.zeros((0, len(ps)))
    return ks, c.norms(table, ps)


def besov_from_blocks(mean: float, ks, block_norms: np.ndarray, alpha: float, q) -> tuple:
    q = _parse_p(q)
    weighted = np.array([2.0 ** (k * alpha) for k in ks]) * np.asarray(block_norms, dtype=float)
    return lq_aggregate(np.concatenate([[abs(mean)], weighted]), q), weighted


def besov_norm(x: QElement, alpha: float, p, q, profile=None, ctrl=None, ctx=None) -> NormResult:
    """``(|x(0)|^q + sum_k 2^{q k alpha} ||phi_k * x||_p^q)^{1/q}``."""
    c = _ctx(x, ctrl, ctx)
    ks, norms = besov_block_norms(x, [p], profile, ctx=c)
    value, weighted = besov_from_blocks(x.mean(), ks, norms[:, 0] if len(ks) else [], alpha, q)
    breakdown = {"mean": abs(x.mean())}
    breakdown.update({f"block {k}": float(w) for k, w in zip(ks, weighted)})
    diag = c.diagnostics()
    diag["profile"] = get_profile(profile).name
    return NormResult(value, breakdown, diag)


# ------------------------------------------------------------- quadrature
@dataclass(frozen=True)
class QuadratureGrid:
    """Composite Gauss-Legendre rule in ``s = log eps``.

    ``n_points`` nodes split into panels of ``order`` nodes on
    ``[log eps_min, log eps_max]``.  The r-integrals of the circular
    characterizations use ``r = exp(-2 pi eps)`` on ``[eps_min, circular_eps_max]``.
    Below ``eps_min`` the integrand is a power of ``eps`` and is added in closed form.
    """

    n_points: int = 200
    eps_min: float = 1e-6
    eps_max: float = 1.0
    circular_eps_max: float = 4.0
    order: int = 8
    refine: bool = True
    rtol: float = 1e-4
    max_doublings: int = 2

    def nodes(self, circular: bool = False, n_points: int | None = None):
        """Return ``(eps, weights)`` with weights for ``ds = d eps / eps``."""
        n = n_points or self.n_points
        panels = max(1, int(round(n / self.order)))
        lo = math.log(self.eps_min)
        hi = math.log(self.circular_eps_max if circular else self.eps_max)
        t, w = np.polynomial.legendre.leggauss(self.order)
        edges = np.linspace(lo, hi, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        s = (mid[:, None] + half[:, None] * t[None, :]).reshape(-1)
        ws = (half[:, None] * w[None, :]).reshape(-1)
        return np.exp(s), ws

    def doubled(self) -> "QuadratureGrid":
        return QuadratureGrid(2 * self.n_points, self.eps_min, self.eps_max, self.circular_eps_max,
                              self.order, self.refine, self.rtol, self.max_doublings)

    def to_dict(self) -> dict:
        return {"n_points": self.n_points, "eps_min": self.eps_min, "eps_max": self.eps_max,
                "circular_eps_max": self.circular_eps_max, "order": self.order}


def _check_kind(kind: str):
    if kind not in SEMIGROUP_KINDS:
        raise ValueError(f"unknown characterization {kind!r}; expected one of {SEMIGROUP_KINDS}")


def _weight_exponent(kind: str, alpha: float, k: int) -> float:
    if kind in ("poisson-eps", "circular-poisson"):
        if not k > alpha:
            raise ConstraintError(f"the Poisson characterization requires k > alpha (k={k}, alpha={alpha})")
        return k - alpha
    if not k > alpha / 2:
        raise ConstraintError(f"the heat characterization requires k > alpha/2 (k={k}, alpha={alpha})")
    return k - alpha / 2.0


def _low_frequencies(x: QElement, kind: str, k: int) -> np.ndarray:
    """Mask of frequencies feeding the head term of the circular forms."""
    r2 = np.sum(x.freqs.astype(float) ** 2, axis=1)
    if kind == "circular-poisson":
        return np.sqrt(r2) < k
    if kind == "circular-heat":
        return r2 < k
    return np.zeros(len(x), dtype=bool)


@dataclass
class SemigroupProfile:
    """L_p norms of the semigroup family at the quadrature nodes.

    ``norms[i, j]`` is ``||J^k S_i x_k||_{ps[j]}`` at node ``eps[i]``;
    ``measure[i]`` converts the node's integrand to the ``dr/(1-r)`` or
    ``d eps/eps`` measure, and ``base[i]`` is ``eps`` or ``1 - r`` raised to
    the weight exponent later.
    """

    kind: str
    k: int
    ps: list
    eps: np.ndarray
    weights: np.ndarray
    base: np.ndarray
    measure: np.ndarray
    norms: np.ndarray
    head: float
    mean: float
    symbols: np.ndarray
    base_floor: float

    def integrand(self, alpha: float, j: int) -> np.ndarray:
        w = _weight_exponent(self.kind, alpha, self.k)
        return self.base ** w * self.norms[:, j]

    def aggregate(self, alpha: float, p, q) -> tuple:
        """Return ``(value, integral_part, head)`` for the given ``(alpha, p, q)``."""
        q = _parse_p(q)
        j = self.ps.index(_parse_p(p))
        f = self.integrand(alpha, j)
        if math.isinf(q):
            body = float(f.max()) if f.size else 0.0
            return max(self.head, body), body, self.head
        w = _weight_exponent(self.kind, alpha, self.k)
        integral = float(np.sum(self.weights * self.measure * f ** q))
        # below eps_min f ~ base^w; rescale the first node to the floor of the rule
        f_floor = f[0] * (self.base_floor / self.base[0]) ** w
        integral += float(f_floor ** q / (q * w))
        return (self.head ** q + integral) ** (1.0 / q), integral, self.head


def _semigroup_symbols(x: QElement, kind: str, k: int, eps: np.ndarray, keep: np.ndarray):
    f = x.freqs
    out = np.zeros((eps.size, len(x)), dtype=complex)
    if kind in ("poisson-eps", "heat-eps"):
        base_kind = kind.split("-")[0]
        if k < 0 and abs(x.mean()) > 0:
            raise ConstraintError("negative k integrates in eps and needs x(0) = 0")
        for i, e in enumerate(eps):
            out[i] = semigroup_symbol(base_kind, float(e), k).rule(f)
    else:
        base_kind = kind.split("-")[1]
        for i, e in enumerate(eps):
            out[i] = circular_semigroup_symbol(base_kind, float(math.exp(-2 * math.pi * e)), k).rule(f)
    out[:, ~keep] = 0.0
    return out


def semigroup_profile(x: QElement, kind: str, k: int, ps: Sequence, grid: QuadratureGrid | None = None,
                      ctrl=None, ctx=None, n_points: int | None = None) -> SemigroupProfile:
    _check_kind(kind)
    grid = grid or QuadratureGrid()
    c = _ctx(x, ctrl, ctx)
    ps = [_parse_p(p) for p in ps]
    circular = kind.startswith("circular")
    eps, weights = grid.nodes(circular, n_points)
    low = _low_frequencies(x, kind, k)
    head = float(np.max(np.abs(x.vals[low]))) if np.any(low) else 0.0
    if not circular:
        head = abs(x.mean())
    keep = ~low if kind == "circular-poisson" else np.ones(len(x), dtype=bool)
    sym = _semigroup_symbols(x, kind, k, eps, keep)
    norms = c.norms(sym, ps)
    if circular:
        r = np.exp(-2 * math.pi * eps)
        base = -np.expm1(-2 * math.pi * eps)
        measure = 2 * math.pi * eps * r / base
    else:
        base = eps
        measure = np.ones_like(eps)
    return SemigroupProfile(kind, int(k), ps, eps, weights, base, measure, norms, head, abs(x.mean()), sym,
                            _base_at(kind, grid.eps_min))


def besov_norm_semigroup(x: QElement, alpha: float, p, q, kind: str = "poisson-eps", k: int = 1,
                         grid: QuadratureGrid | None = None, ctrl=None, ctx=None) -> NormResult:
    """Besov norm through a Poisson or heat semigroup.

    ``kind`` selects the eps-parametrized semigroups (``poisson-eps``,
    ``heat-eps``) or the circular ones in ``r`` (``circular-poisson`` with the
    low-frequency head term and ``x_k``, ``circular-heat``).
    """
    _check_kind(kind)
    _weight_exponent(kind, alpha, k)
    grid = grid or QuadratureGrid()
    c = _ctx(x, ctrl, ctx)
    prof = semigroup_profile(x, kind, k, [p], grid, ctx=c)
    value, integral, head = prof.aggregate(alpha, p, q)
    diag = c.diagnostics()
    diag.update({"kind": kind, "k": int(k), "nodes": int(prof.eps.size), "refined": False})
    if grid.refine:
        n = grid.n_points
        delta = math.inf
        for _ in range(grid.max_doublings):
            n *= 2
            finer = semigroup_profile(x, kind, k, [p], grid, ctx=c, n_points=n)
            new_value = finer.aggregate(alpha, p, q)[0]
            delta = abs(new_value - value) / max(abs(new_value), 1e-300)
            value, prof = new_value, finer
            if delta < grid.rtol:
                break
        diag.update({"refined": True, "nodes": int(prof.eps.size), "quadrature_delta": delta,
                     "quadrature_converged": bool(delta < grid.rtol)})
        value, integral, head = prof.aggregate(alpha, p, q)
    breakdown = {"head": head, "integral": integral}
    return NormResult(float(value), breakdown, diag)


# --------------------------------------------------------- Triebel-Lizorkin
def gram_element(x: QElement, symbols: np.ndarray, weights: np.ndarray, side: str = "column") -> QElement:
    """``sum_i w_i y_i^* y_i`` (column) or ``sum_i w_i y_i y_i^*`` (row), ``y_i = M_{symbols[i]} x``.

    Computed exactly in the algebra through the kernel ``K = Psi^H diag(w) Psi``.
    """
    symbols = np.atleast_2d(np.asarray(symbols, dtype=complex))
    w = np.asarray(weights, dtype=float)
    if x.is_zero():
        return x
    K = (symbols.conj().T * w) @ symbols  # K[a, b] = sum_i w_i conj(psi_ia) psi_ib
    F = x.freqs
    rho = adjoint_phase(x.theta, F)
    if side == "column":
        coeff = np.conj(x.vals)[:, None] * x.vals[None, :] * K
        ph = rho[:, None] + phase_matrix(x.theta, -F, F)
        freqs = F[None, :, :] - F[:, None, :]
    elif side == "row":
        coeff = x.vals[:, None] * np.conj(x.vals)[None, :] * np.conj(K)
        ph = rho[None, :] + phase_matrix(x.theta, F, -F)
        freqs = F[:, None, :] - F[None, :, :]
    else:
        raise ValueError("side must be 'column' or 'row'")
    vals = coeff * np.exp(1j * ph)
    return QElement.from_arrays(x.theta, freqs.reshape(-1, x.d), vals.reshape(-1), x.prune_tol)


def positive_root_norm(s: QElement, p, ctrl: LpControl | None = None) -> float:
    """``||s^{1/2}||_p = tau(s^{p/2})^{1/p}`` for a positive element ``s``."""
    p = _parse_p(p)
    ctrl = ctrl or LpControl()
    if s.is_zero():
        return 0.0
    if p == 2.0 and ctrl.exact_p2:
        return math.sqrt(max(s.mean().real, 0.0))
    st = MultiplierStack(s, _default_level(s, ctrl), ctrl.max_size)
    spectra = []
    for pat in st.patterns:
        a = pat.dense()
        lam = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
        spectra.append(np.clip(lam, 0.0, None))
    return st._estimate(spectra, p)[0]


def _column_value(x, symbols, weights, p, ctrl, side="column") -> float:
    s = gram_element(x, symbols, weights, side)
    return positive_root_norm(s, p, ctrl)


def _split(x: QElement, mask: np.ndarray):
    a = QElement.from_arrays(x.theta, x.freqs[mask], x.vals[mask], x.prune_tol, aggregate=False)
    b = QElement.from_arrays(x.theta, x.freqs[~mask], x.vals[~mask], x.prune_tol, aggregate=False)
    return a, b


def _flavored(x: QElement, p: float, flavor: str, single) -> tuple:
    """Column, row or mixture value from a callable ``single(element, side)``."""
    if flavor == "column":
        return single(x, "column"), {}
    if flavor == "row":
        return single(x, "row"), {}
    if flavor != "mixture":
        raise ValueError("flavor must be 'column', 'row' or 'mixture'")
    if p >= 2:
        col, row = single(x, "column"), single(x, "row")
        return max(col, row), {"column": col, "row": row}
    candidates = {"(x,0)": single(x, "column"), "(0,x)": single(x, "row")}
    for j in range(x.d):
        for sign, label in ((1, "+"), (-1, "-")):
            mask = sign * x.freqs[:, j] > 0
            y, z = _split(x, mask)
            candidates[f"axis{j}{label}"] = single(y, "column") + single(z, "row")
    best = min(candidates.values())
    return best, {"candidates": candidates, "upper_bound": True}


def triebel_norm(x: QElement, alpha: float, p, flavor: str = "column", profile=None,
                 ctrl: LpControl | None = None) -> NormResult:
    """``||(|x(0)|^2 + sum_k 2^{2 k alpha} |phi_k * x|^2)^{1/2}||_p`` and its row/mixture forms."""
    p = _parse_p(p)
    if math.isinf(p):
        raise ValueError("p = inf is not supported for Triebel-Lizorkin norms")
    ctrl = ctrl or LpControl()
    prof = get_profile(profile)

    def single(y: QElement, side: str) -> float:
        if y.is_zero():
            return 0.0
        ks, table = block_coefficients(y, prof)
        mean = abs(y.mean())
        if not ks:
            return mean
        w = np.array([2.0 ** (2 * k * alpha) for k in ks])
        s = gram_element(y, table, w, side) + monomial(y.theta, np.zeros(y.d, dtype=np.int64), mean ** 2)
        return positive_root_norm(s, p, ctrl)

    value, extra = _flavored(x, p, flavor, single)
    diag = {"flavor": flavor, "profile": prof.name, "N_level": _default_level(x, ctrl)}
    diag.update(extra)
    return NormResult(float(value), {"mean": abs(x.mean())}, diag)


def _base_at(kind: str, eps: float) -> float:
    """``eps`` or ``1 - r`` with ``r = e^{-2 pi eps}``."""
    return -math.expm1(-2 * math.pi * eps) if kind.startswith("circular") else eps


def _square_function_weights(kind, alpha, k, eps, weights, eps_min):
    """Quadrature weights for ``int base^{2w} |y|^2 dmu``, including the tail below ``eps_min``."""
    w = _weight_exponent(kind, alpha, k)
    if kind.startswith("circular"):
        base = -np.expm1(-2 * math.pi * eps)
        measure = 2 * math.pi * eps * np.exp(-2 * math.pi * eps) / base
    else:
        base = eps
        measure = np.ones_like(eps)
    c = weights * measure * base ** (2 * w)
    tail = _base_at(kind, eps_min) ** (2 * w) / (2 * w)
    return c, tail


def triebel_norm_poisson(x: QElement, alpha: float, p, k: int = 1, grid: QuadratureGrid | None = None,
                         kind: str = "poisson-eps", flavor: str = "column",
                         ctrl: LpControl | None = None) -> NormResult:
    """Triebel-Lizorkin norm through a semigroup square function.

    Builds the positive element ``sum_i c_i y_i^* y_i`` with ``y_i`` the
    semigroup family at the quadrature nodes and returns the head term plus
    ``||.||_{p/2}^{1/2}`` of it.
    """
    _check_kind(kind)
    p = _parse_p(p)
    if math.isinf(p):
        raise ValueError("p = inf is not supported for Triebel-Lizorkin norms")
    _weight_exponent(kind, alpha, k)
    grid = grid or QuadratureGrid(n_points=96, refine=False)
    ctrl = ctrl or LpControl()
    eps, weights = grid.nodes(kind.startswith("circular"))
    c, tail = _square_function_weights(kind, alpha, k, eps, weights, grid.eps_min)

    def single(y: QElement, side: str) -> float:
        if y.is_zero():
            return 0.0
        low = _low_frequencies(y, kind, k)
        head = float(np.max(np.abs(y.vals[low]))) if np.any(low) else 0.0
        if kind in ("poisson-eps", "heat-eps"):
            head = abs(y.mean())
        keep = ~low if kind == "circular-poisson" else np.ones(len(y), dtype=bool)
        sym = _semigroup_symbols(y, kind, k, eps, keep)
        sym = np.vstack([sym, sym[:1]])
        wts = np.concatenate([c, [tail]])
        return head + _column_value(y, sym, wts, p, ctrl, side)

    value, extra = _flavored(x, p, flavor, single)
    diag = {"kind": kind, "k": int(k), "flavor": flavor, "nodes": int(eps.size)}
    diag.update(extra)
    return NormResult(float(value), {"mean": abs(x.mean())}, diag)


def hardy_norm(x: QElement, p, ctrl: LpControl | None = None, grid: QuadratureGrid | None = None,
               flavor: str = "column") -> NormResult:
    """``|x(0)| + ||s^c(x)||_p`` with the circular Poisson square function
    ``s^c(x) = (int_0^1 |d/dr P_r x|^2 (1-r) dr)^{1/2}``."""
    return triebel_norm_poisson(x, 0.0, p, 1, grid, "circular-poisson", flavor, ctrl)
