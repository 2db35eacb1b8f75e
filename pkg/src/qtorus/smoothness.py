"""Moduli of smoothness and what is built from them.

``omega_p^k(x, eps) = sup_{0 < |u| <= eps} ||Delta_u^k x||_p`` is approximated
from below on a grid of directions and radii.  Since
``Delta_{-u}^k = (-1)^k T_{-ku} Delta_u^k`` and translations are isometries,
only one direction of each antipodal pair is evaluated.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import QElement
from .matrix_rep import LpControl, _parse_p
from .multipliers import derivative_symbol
from .spaces import NormContext, NormResult, QuadratureGrid, _ctx, lq_aggregate, sobolev_norm

__all__ = [
    "DirectionGrid",
    "default_grid",
    "difference_symbols",
    "modulus",
    "ModulusProfile",
    "modulus_profile",
    "besov_diff_norm",
    "limit_scan",
    "lipschitz_ratio",
    "k2_oracle",
    "k_functional",
    "certificate_symbol",
    "marchaud_check",
    "difference_product_terms",
]


def _fibonacci_sphere(n: int, d: int) -> np.ndarray:
    if d != 3:
        raise ValueError("Fibonacci points are only used in d = 3")
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    ang = math.pi * (1 + math.sqrt(5)) * i
    return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)


def _random_sphere(n: int, d: int) -> np.ndarray:
    g = np.random.default_rng(12345).normal(size=(n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class DirectionGrid:
    """Unit directions and radial fractions for the sup over ``|u| <= eps``."""

    sphere_points: np.ndarray
    radial_points: tuple = tuple((i + 1) / 8 for i in range(8))
    level: int = 0

    @property
    def d(self) -> int:
        return self.sphere_points.shape[1]

    def half_directions(self) -> np.ndarray:
        """One representative of each antipodal pair."""
        keep = []
        for v in self.sphere_points:
            if not any(np.allclose(v, -w, atol=1e-12) or np.allclose(v, w, atol=1e-12) for w in keep):
                keep.append(v)
        return np.array(keep).reshape(-1, self.d)

    def refined(self) -> "DirectionGrid":
        n = self.sphere_points.shape[0]
        nr = len(self.radial_points)
        g = default_grid(self.d, 2 * n, 2 * nr)
        return DirectionGrid(g.sphere_points, g.radial_points, self.level + 1)


def default_grid(d: int, n_directions: int = 64, n_radii: int = 8) -> DirectionGrid:
    """Equispaced angles in d = 2, Fibonacci points in d = 3, random points beyond.

    Coordinate directions and the normalized all-ones direction are always included.
    """
    if d == 1:
        pts = np.array([[1.0], [-1.0]])
    elif d == 2:
        ang = 2 * math.pi * np.arange(n_directions) / n_directions
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    elif d == 3:
        pts = _fibonacci_sphere(n_directions, 3)
    else:
        pts = _random_sphere(n_directions, d)
    extra = [np.eye(d)[j] for j in range(d)] + [np.ones(d) / math.sqrt(d)]
    for v in extra:
        if not np.any(np.all(np.abs(pts - v) < 1e-12, axis=1)):
            pts = np.vstack([pts, v])
    radii = tuple((i + 1) / n_radii for i in range(n_radii))
    return DirectionGrid(pts, radii)


def difference_symbols(x: QElement, us: np.ndarray, k: int) -> np.ndarray:
    """Rows ``(e^{2 pi i u.m} - 1)^k`` on the support of ``x`` for each ``u``."""
    us = np.atleast_2d(np.asarray(us, dtype=float))
    return np.expm1(2j * math.pi * (us @ x.freqs.T.astype(float))) ** int(k)


@dataclass
class ModulusProfile:
    """``omega[j, i]`` = grid modulus at ``eps[i]`` for ``ps[j]``.

    Every evaluated ``u`` with ``|u| <= eps`` contributes to ``omega(eps)``,
    so coarse radial grids at one node are complemented by the other nodes.
    """

    k: int
    ps: list
    eps: np.ndarray
    omega: np.ndarray
    radii: np.ndarray
    radial_max: np.ndarray

    def at(self, p) -> np.ndarray:
        return self.omega[self.ps.index(_parse_p(p))]


def modulus_profile(x: QElement, k: int, eps: Sequence[float], ps: Sequence, grid: DirectionGrid | None = None,
                    ctrl=None, ctx: NormContext | None = None) -> ModulusProfile:
    if int(k) != k or k < 1:
        raise ValueError("k must be an integer >= 1")
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise ValueError("eps must be positive")
    grid = grid or default_grid(x.d)
    c = _ctx(x, ctrl, ctx)
    ps = [_parse_p(p) for p in ps]
    dirs = grid.half_directions()
    radii = np.unique(np.round(np.outer(eps, grid.radial_points).reshape(-1), 15))
    us = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, x.d)
    if x.is_zero():
        vals = np.zeros((us.shape[0], len(ps)))
    else:
        vals = c.norms(difference_symbols(x, us, k), ps)
    per_radius = vals.reshape(radii.size, dirs.shape[0], len(ps)).max(axis=1)  # (R, P)
    cum = np.maximum.accumulate(per_radius, axis=0)
    pos = np.searchsorted(radii, eps * (1 + 1e-12), side="right") - 1
    omega = cum[pos].T  # (P, E)
    return ModulusProfile(int(k), ps, eps, omega, radii, per_radius.T)


def modulus(x: QElement, k: int, eps: float, p, grid: DirectionGrid | None = None,
            ctrl=None, ctx=None, refine: bool = True, return_diagnostics: bool = False):
    """Grid lower bound for ``omega_p^k(x, eps)``; refined once when the sup moves by > 1%."""
    grid = grid or default_grid(x.d)
    c = _ctx(x, ctrl, ctx)
    value = float(modulus_profile(x, k, [eps], [p], grid, ctx=c).omega[0, 0])
    diag = {"grid_level": grid.level, "refined": False}
    if refine:
        finer = float(modulus_profile(x, k, [eps], [p], grid.refined(), ctx=c).omega[0, 0])
        moved = abs(finer - value) / max(value, 1e-300)
        diag["relative_move"] = moved
        if moved > 0.01:
            diag.update({"refined": True, "grid_level": grid.level + 1})
        value = max(value, finer)
    return (value, diag) if return_diagnostics else value


def _omega_infinity(x: QElement, k: int, ps, grid, ctx) -> np.ndarray:
    """``sup_u ||Delta_u^k x||_p``: beyond radius sqrt(d)/2 the ball covers a period cell."""
    top = max(1.0, math.sqrt(x.d) / 2)
    ext = np.geomspace(top / 4, top, 8)
    return modulus_profile(x, k, ext, ps, grid, ctx=ctx).omega[:, -1]


def _diff_integral(eps, weights, omega, alpha, q, k, eps_min):
    """``int_0^1 eps^{-alpha q} omega^q d eps/eps``; below ``eps_min`` the integrand is ``~ eps^{(k-alpha) q}``."""
    f = eps ** (-alpha) * omega
    body = float(np.sum(weights * f ** q))
    f_floor = f[0] * (eps_min / eps[0]) ** (k - alpha)
    tail = float(f_floor ** q / ((k - alpha) * q))
    return body + tail


def besov_diff_norm(x: QElement, alpha: float, p, q, k: int = 1, grid: DirectionGrid | None = None,
                    quad: QuadratureGrid | None = None, ctrl=None, ctx=None,
                    include_mean: bool = True) -> NormResult:
    """``(|x(0)|^q + int_0^1 eps^{-alpha q} omega_p^k(x, eps)^q d eps/eps)^{1/q}``."""
    if not 0 < alpha < k:
        raise ValueError(f"the difference characterization needs 0 < alpha < k (alpha={alpha}, k={k})")
    q = _parse_p(q)
    quad = quad or QuadratureGrid(n_points=64, eps_min=1e-4, refine=False)
    c = _ctx(x, ctrl, ctx)
    eps, weights = quad.nodes()
    prof = modulus_profile(x, k, eps, [p], grid, ctx=c)
    om = prof.omega[0]
    mean = abs(x.mean()) if include_mean else 0.0
    if math.isinf(q):
        body = float(np.max(eps ** (-alpha) * om))
        value = max(mean, body)
    else:
        body = _diff_integral(eps, weights, om, alpha, q, k, quad.eps_min)
        value = (mean ** q + body) ** (1.0 / q)
    diag = c.diagnostics()
    diag.update({"nodes": int(eps.size), "k": int(k)})
    return NormResult(float(value), {"mean": mean, "integral": body}, diag)


def limit_scan(x: QElement, k: int, p, q, end: str, alphas: Sequence[float], grid: DirectionGrid | None = None,
               quad: QuadratureGrid | None = None, ctrl=None, ctx=None) -> list:
    """Rows ``(alpha, scaled, target, ratio)`` approaching ``alpha -> k`` or ``alpha -> 0``.

    ``scaled`` is ``(k - alpha)^{1/q}`` (resp. ``alpha^{1/q}``) times the
    difference seminorm.  For ``alpha -> 0`` the seminorm integral is taken over
    ``(0, inf)``: beyond a period cell the modulus is constant, contributing
    ``omega_inf^q / (alpha q)``, without which ``alpha^{1/q}`` times a bounded
    integral would tend to zero.
    """
    if end not in ("alpha_to_k", "alpha_to_0"):
        raise ValueError("end must be 'alpha_to_k' or 'alpha_to_0'")
    q = _parse_p(q)
    if math.isinf(q):
        raise ValueError("limit scans need finite q")
    alphas = [float(a) for a in alphas]
    if any(not 0 < a < k for a in alphas):
        raise ValueError("alphas must lie inside (0, k)")
    quad = quad or QuadratureGrid(n_points=160, eps_min=1e-5, refine=False)
    grid = grid or default_grid(x.d)
    c = _ctx(x, ctrl, ctx)
    eps, weights = quad.nodes()
    om = modulus_profile(x, k, eps, [p], grid, ctx=c).omega[0]
    if end == "alpha_to_k":
        target = q ** (-1.0 / q) * sobolev_norm(x, k, p, seminorm_only=True, ctx=c).value
    else:
        # the limit sees x - x(0) only, since differences kill constants
        base = c.norm(np.where(np.any(x.freqs != 0, axis=1), 1.0, 0.0), p)
        target = q ** (-1.0 / q) * base
        om_inf = float(_omega_infinity(x, k, [p], grid, c)[0])
    rows = []
    for a in alphas:
        integral = _diff_integral(eps, weights, om, a, q, k, quad.eps_min)
        if end == "alpha_to_k":
            scaled = ((k - a) * integral) ** (1.0 / q)
        else:
            scaled = (a * (integral + om_inf ** q / (a * q))) ** (1.0 / q)
        rows.append({"alpha": a, "scaled": scaled, "target": target,
                     "ratio": scaled / target if target > 0 else (0.0 if scaled == 0 else math.inf)})
    diffs = [abs(rows[i + 1]["scaled"] - rows[i]["scaled"]) for i in range(len(rows) - 1)]
    for i, r in enumerate(rows):
        r["step"] = diffs[i - 1] if i > 0 else None
    return rows


def lipschitz_ratio(x: QElement, k: int, p, eps_list: Sequence[float], grid: DirectionGrid | None = None,
                    ctrl=None, ctx=None, slack: float = 1.05) -> dict:
    """Table of ``omega/eps^k`` against ``|x|_{W^k_p}`` along a decreasing ``eps`` list."""
    eps = np.asarray(eps_list, dtype=float)
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps_list must be strictly decreasing")
    c = _ctx(x, ctrl, ctx)
    om = modulus_profile(x, k, eps, [p], grid, ctx=c).omega[0]
    semi = sobolev_norm(x, k, p, seminorm_only=True, ctx=c).value
    q = om / eps ** k
    rows = [{"eps": float(e), "omega_over_eps_k": float(v), "seminorm": semi,
             "ratio": float(v / semi) if semi > 0 else 0.0} for e, v in zip(eps, q)]
    increasing = bool(np.all(q[1:] * slack >= q[:-1]))
    return {"rows": rows, "increasing": increasing, "seminorm": semi}


# ------------------------------------------------------------ K-functional
def _w2(x: QElement, k: int) -> np.ndarray:
    """``sum_{|mu| <= k} (2 pi)^{2|mu|} m^{2 mu}`` on the support."""
    total = np.zeros(len(x))
    for order in range(k + 1):
        for mu in itertools.product(range(order + 1), repeat=x.d):
            if sum(mu) == order:
                total += np.abs(derivative_symbol(mu).evaluate(x.freqs)) ** 2
    return total


def k2_oracle(x: QElement, t: float, k: int) -> float:
    """``(sum |x(m)|^2 t^2 w^2 / (1 + t^2 w^2))^{1/2}``, the quadratic K-functional at p = 2."""
    w2 = _w2(x, k)
    a = (t * t) * w2
    return float(math.sqrt(np.sum(np.abs(x.vals) ** 2 * a / (1.0 + a))))


def _interval_average(a: np.ndarray) -> np.ndarray:
    """``int_0^1 e^{2 pi i a s} ds``."""
    a = np.asarray(a, dtype=float)
    z = 2j * math.pi * a
    out = np.ones(a.shape, dtype=complex)
    nz = a != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def certificate_symbol(x: QElement, eps: float, k: int) -> np.ndarray:
    """Symbol of ``y = (-1)^k int_{[0,1)^{dk}} Delta^k_{eps(u_1+...+u_k)} x du``.

    Expanding ``(e - 1)^k`` binomially turns each term into a product of
    one-dimensional averages, so the integral is evaluated exactly.
    """
    f = x.freqs.astype(float)
    out = np.zeros(len(x), dtype=complex)
    for j in range(k + 1):
        avg = np.prod(_interval_average(j * eps * f), axis=1) ** k
        out += math.comb(k, j) * (-1) ** (k - j) * avg
    return (-1) ** k * out


def k_functional(x: QElement, t: float, k: int, p, mode: str = "upper_certificate",
                 grid: DirectionGrid | None = None, eps_list: Sequence[float] | None = None,
                 ctrl=None, ctx=None):
    """K-functional between ``L_p`` and ``W^k_p`` in one of three modes.

    ``upper_certificate``: a decomposition ``x = y + z`` from averaged differences
    (and the trivial ones) giving an upper bound.  ``l2_oracle``: the quadratic
    functional ``K_2`` at ``p = 2`` with ``K_2 <= K <= sqrt(2) K_2``.
    ``equivalence_check``: ratios ``(eps^k |x(0)| + omega) / K_2(eps^k)`` over ``eps_list``.
    """
    p = _parse_p(p)
    if t <= 0:
        raise ValueError("t must be positive")
    c = _ctx(x, ctrl, ctx)
    if mode == "l2_oracle":
        if p != 2.0:
            raise ValueError("the l2 oracle is only available at p = 2")
        k2 = k2_oracle(x, t, k)
        return {"K2": k2, "lower": k2, "upper": math.sqrt(2) * k2}
    if mode == "upper_certificate":
        eps = t ** (1.0 / k)
        ysym = certificate_symbol(x, eps, k)
        y_norm = c.norm(ysym, p)
        z_sym_base = 1.0 - ysym
        mus = [mu for o in range(k + 1) for mu in itertools.product(range(o + 1), repeat=x.d) if sum(mu) == o]
        syms = np.array([z_sym_base * derivative_symbol(mu).evaluate(x.freqs) for mu in mus])
        z_norm = lq_aggregate(c.norms(syms, [p])[:, 0], p)
        x_norm = c.norm(None, p)
        x_sob = sobolev_norm(x, k, p, ctx=c).value
        candidates = {"averaged": y_norm + t * z_norm, "(x,0)": x_norm, "(0,x)": t * x_sob}
        return {"value": min(candidates.values()), "candidates": candidates, "eps": eps}
    if mode == "equivalence_check":
        if p != 2.0:
            raise ValueError("the equivalence check uses the l2 oracle and needs p = 2")
        eps = np.asarray(eps_list if eps_list is not None else [2.0 ** -j for j in range(1, 9)], dtype=float)
        om = modulus_profile(x, k, eps, [p], grid, ctx=c).omega[0]
        rows = []
        for e, w in zip(eps, om):
            k2 = k2_oracle(x, e ** k, k)
            lhs = e ** k * abs(x.mean()) + w
            rows.append({"eps": float(e), "lhs": float(lhs), "K2": k2, "ratio": lhs / k2 if k2 > 0 else math.nan})
        return {"rows": rows}
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- Marchaud
def marchaud_check(x: QElement, n: int, N: int, p, eps_list: Sequence[float], grid: DirectionGrid | None = None,
                   ctrl=None, ctx=None, slack: float = 1.05, quad: QuadratureGrid | None = None) -> dict:
    """Lower bound ``2^{n-N} omega^N <= omega^n`` and the integral upper bound.

    Both moduli are taken over the same set of ``u``; the lower bound then
    holds pointwise in ``u`` and therefore on the grid.
    """
    if not 1 <= n < N:
        raise ValueError("need 1 <= n < N")
    c = _ctx(x, ctrl, ctx)
    grid = grid or default_grid(x.d)
    quad = quad or QuadratureGrid(n_points=48, eps_min=min(eps_list) / 2, refine=False)
    deltas, dw = quad.nodes()
    eps = np.asarray(eps_list, dtype=float)
    allpts = np.unique(np.concatenate([eps, deltas]))
    om_n = modulus_profile(x, n, allpts, [p], grid, ctx=c).omega[0]
    om_N = modulus_profile(x, N, allpts, [p], grid, ctx=c).omega[0]
    lookup = {float(e): i for i, e in enumerate(allpts)}
    dN = om_N[[lookup[float(v)] for v in deltas]]
    om_N_inf = float(_omega_infinity(x, N, [p], grid, c)[0])
    rows = []
    violations = 0
    for e in eps:
        i = lookup[float(e)]
        lhs = 2.0 ** (n - N) * om_N[i]
        rhs = om_n[i]
        ok = lhs <= slack * rhs + 1e-15
        violations += not ok
        above = deltas >= e
        integral = float(np.sum(dw[above] * dN[above] / deltas[above] ** n))
        integral += om_N_inf / n  # delta >= 1: the modulus has saturated
        upper = e ** n * integral
        rows.append({"eps": float(e), "lower_lhs": float(lhs), "omega_n": float(rhs), "ok": bool(ok),
                     "ratio": float(lhs / rhs) if rhs > 0 else 0.0, "upper": upper,
                     "upper_ratio": float(rhs / upper) if upper > 0 else 0.0})
    return {"rows": rows, "violations": violations}


def difference_product_terms(xi: np.ndarray, us: Sequence[np.ndarray]) -> tuple:
    """Both sides of ``Delta_{u_1}...Delta_{u_k} = sum_D (-1)^{|D|} T_{bar u_D} Delta^k_{u_D}``
    at frequency ``xi``, with ``bar u_D = sum_D u_j`` and ``u_D = -sum_D u_j / j``."""
    xi = np.asarray(xi, dtype=float)
    k = len(us)
    e = lambda u: np.exp(2j * math.pi * float(np.dot(u, xi)))  # noqa: E731
    lhs = np.prod([e(u) - 1 for u in us])
    rhs = 0j
    for r in range(k + 1):
        for D in itertools.combinations(range(k), r):
            ubar = sum((us[j] for j in D), np.zeros_like(xi))
            uD = -sum((us[j] / (j + 1) for j in D), np.zeros_like(xi))
            rhs += (-1) ** r * e(ubar) * (e(uD) - 1) ** k
    return complex(lhs), complex(rhs)
