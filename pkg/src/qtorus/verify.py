"""Random corpora and named inequality suites.

A suite evaluates one family of inequalities or equivalences on every element
of a corpus and returns an :class:`InequalityReport`.  Mathematical failure is
data: suites never raise because an inequality failed, they record it.

Each row carries a ``group`` (the parameter combination it belongs to) and
an ``ok`` flag.  A report passes when every row is ok and every group meets
its spread bound, if one is configured.
"""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .algebra import QElement, ThetaMatrix, element_to_dict, monomial
from .littlewood_paley import block_coefficients, get_profile
from .matrix_rep import LpControl, TruncationWindow, _parse_p, lp_norm, to_matrix
from .multipliers import Symbol, apply, bessel_symbol, riesz_symbol, strip_mean
from .spaces import (
    NormContext,
    QuadratureGrid,
    besov_block_norms,
    besov_from_blocks,
    besov_norm,
    hardy_norm,
    potential_norm,
    semigroup_profile,
    sobolev_norm,
    triebel_norm,
    triebel_norm_poisson,
)
from .smoothness import (
    _diff_integral,
    default_grid,
    k2_oracle,
    k_functional,
    limit_scan,
    lipschitz_ratio,
    marchaud_check,
    modulus_profile,
)

__all__ = [
    "CorpusSpec",
    "InequalityReport",
    "random_element",
    "generate_corpus",
    "random_symbol_table",
    "run_suite",
    "SUITES",
    "UnknownSuiteError",
    "scalar_lp_norm",
    "heat_smoothing_constant",
    "besov_equiv_k",
    "peak_constant",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CSV_COLUMNS = ("suite", "sample_id", "param_json", "lhs", "rhs", "ratio", "diag_json")


class UnknownSuiteError(KeyError):
    pass


@dataclass(frozen=True)
class CorpusSpec:
    """Recipe for a reproducible random corpus.

    ``theta`` is a scalar (every pair ``k > j``) or a full matrix and is used
    when ``theta_law == "fixed"``; ``random-skew`` draws fresh angles in
    ``[0, 1)`` per element.  ``mean_free`` drops the zero frequency and
    ``avoid_axis`` drops frequencies with ``m_j = 0`` along that axis.
    """

    d: int = 2
    max_degree: int = 2
    support_density: float = 1.0
    coefficient_law: str = "complex-gaussian"
    theta_law: str = "fixed"
    seed: int = 0
    sample_count: int = 20
    theta: float | tuple = GOLDEN
    mean_free: bool = False
    avoid_axis: int | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        if not 0 < self.support_density <= 1:
            raise ValueError("support_density must lie in (0, 1]")
        if self.coefficient_law not in ("complex-gaussian", "unit-circle"):
            raise ValueError(f"unknown coefficient law {self.coefficient_law!r}")
        if self.theta_law not in ("fixed", "random-skew"):
            raise ValueError(f"unknown theta law {self.theta_law!r}")
        if self.sample_count < 0:
            raise ValueError("sample_count must be >= 0")

    def to_dict(self) -> dict:
        out = asdict(self)
        if isinstance(self.theta, tuple):
            out["theta"] = [list(r) for r in self.theta]
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "CorpusSpec":
        obj = dict(obj)
        th = obj.get("theta")
        if isinstance(th, list):
            obj["theta"] = tuple(tuple(float(v) for v in row) for row in th)
        return cls(**obj)

    def theta_matrix(self, rng: np.random.Generator | None = None) -> ThetaMatrix:
        if self.theta_law == "random-skew":
            rng = rng or np.random.default_rng(self.seed)
            a = np.zeros((self.d, self.d))
            lo = np.tril_indices(self.d, -1)
            a[lo] = rng.uniform(0.0, 1.0, size=len(lo[0]))
            return ThetaMatrix(a - a.T)
        if isinstance(self.theta, (tuple, list)):
            return ThetaMatrix(np.array(self.theta, dtype=float))
        return ThetaMatrix.from_scalar(float(self.theta), self.d)


def _box(d: int, deg: int) -> np.ndarray:
    return TruncationWindow(d, deg).index_set


def random_element(spec: CorpusSpec, index: int = 0) -> QElement:
    """Element number ``index`` of the corpus; independent of the other elements."""
    rng = np.random.default_rng([int(spec.seed), int(index)])
    theta = spec.theta_matrix(rng)
    box = _box(spec.d, spec.max_degree)
    if spec.mean_free:
        box = box[np.any(box != 0, axis=1)]
    if spec.avoid_axis is not None:
        box = box[box[:, spec.avoid_axis] != 0]
    keep = rng.random(box.shape[0]) < spec.support_density
    if not np.any(keep):
        keep[rng.integers(box.shape[0])] = True
    freqs = box[keep]
    s = freqs.shape[0]
    if spec.coefficient_law == "unit-circle":
        vals = np.exp(2j * math.pi * rng.random(s))
    else:
        vals = (rng.normal(size=s) + 1j * rng.normal(size=s)) / math.sqrt(2.0)
    return QElement.from_arrays(theta, freqs, vals)


def generate_corpus(spec: CorpusSpec) -> list:
    return [random_element(spec, i) for i in range(spec.sample_count)]


def random_symbol_table(d: int, deg: int, rng: np.random.Generator) -> Symbol:
    """Bounded random symbol on the box ``[-deg, deg]^d`` (zero outside)."""
    box = _box(d, deg)
    vals = rng.uniform(0.2, 1.0, size=box.shape[0]) * np.exp(2j * math.pi * rng.random(box.shape[0]))
    table = {tuple(int(v) for v in m): complex(c) for m, c in zip(box, vals)}
    return Symbol.table(table, 0.0, "random-table")


# ------------------------------------------------------------------ reports
def _clean(obj):
    """JSON-safe copy with non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"))


@dataclass
class InequalityReport:
    suite: str
    params: dict
    rows: list = field(default_factory=list)
    bound: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    corpus: dict = field(default_factory=dict)
    nonconverged: int = 0
    config: dict = field(default_factory=dict)

    def add(self, sample_id, group: str, lhs: float, rhs: float, ok: bool, ratio: float | None = None,
            params: dict | None = None, diag: dict | None = None):
        if ratio is None:
            ratio = lhs / rhs if rhs != 0 else (0.0 if lhs == 0 else math.inf)
        self.rows.append({
            "sample_id": sample_id, "group": group, "lhs": float(lhs), "rhs": float(rhs),
            "ratio": float(ratio), "ok": bool(ok), "params": params or {}, "diag": diag or {},
        })

    # ---- summaries
    def groups(self) -> dict:
        out = {}
        for r in self.rows:
            out.setdefault(r["group"], []).append(r)
        return out

    def group_summary(self) -> dict:
        spread_max = self.bound.get("max_spread")
        limited = self.bound.get("spread_groups")
        summary = {}
        for g, rows in self.groups().items():
            ratios = [r["ratio"] for r in rows if math.isfinite(r["ratio"])]
            entry = {"count": len(rows), "failed_rows": sum(not r["ok"] for r in rows)}
            if ratios:
                lo, hi = min(ratios), max(ratios)
                entry.update({"min": lo, "median": statistics.median(ratios), "max": hi})
                if spread_max is not None and (limited is None or g in limited):
                    spread = hi / lo if lo > 0 else math.inf
                    entry["spread"] = spread
                    entry["spread_ok"] = bool(spread < spread_max)
            summary[g] = entry
        return summary

    @property
    def verdict(self) -> str:
        if any(not r["ok"] for r in self.rows):
            return "fail"
        for entry in self.group_summary().values():
            if entry.get("spread_ok") is False:
                return "fail"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def summary(self) -> dict:
        ratios = [r["ratio"] for r in self.rows if math.isfinite(r["ratio"])]
        overall = {}
        if ratios:
            overall = {"min": min(ratios), "median": statistics.median(ratios), "max": max(ratios)}
        return {
            "tool": "qtorus", "version": __version__, "suite": self.suite, "params": self.params,
            "corpus": self.corpus, "bound": self.bound, "verdict": self.verdict,
            "rows": len(self.rows), "failed_rows": sum(not r["ok"] for r in self.rows),
            "ratio_summary": overall, "groups": self.group_summary(), "witnesses": self.witnesses,
            "notes": self.notes, "nonconverged": self.nonconverged, "config": self.config,
        }

    def summary_json(self) -> str:
        return json.dumps(_clean(self.summary()), sort_keys=True, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            params = dict(r["params"])
            params["group"] = r["group"]
            diag = dict(r["diag"])
            diag["ok"] = r["ok"]
            w.writerow([self.suite, r["sample_id"], _dumps(params), repr(r["lhs"]), repr(r["rhs"]),
                        repr(r["ratio"]), _dumps(diag)])
        return buf.getvalue()


def _witness(report: InequalityReport, elements: dict, key: str = "max"):
    """Store the elements behind the extreme ratios."""
    finite = [r for r in report.rows if math.isfinite(r["ratio"])]
    if not finite:
        return
    picks = {"max": max(finite, key=lambda r: r["ratio"]), "min": min(finite, key=lambda r: r["ratio"])}
    bad = [r for r in report.rows if not r["ok"]]
    if bad:
        picks["first_failure"] = bad[0]
    for label, row in picks.items():
        x = elements.get(row["sample_id"])
        if x is not None:
            report.witnesses[label] = {"sample_id": row["sample_id"], "group": row["group"],
                                       "ratio": row["ratio"], "element": element_to_dict(x)}


# ------------------------------------------------------------------ helpers
def _ctrl(params: dict) -> LpControl:
    levels = params.get("levels")
    return LpControl(levels=tuple(levels) if levels else None, max_size=int(params.get("max_size", 2500)),
                     estimator=params.get("estimator", "extrapolate"))


def _ps(params: dict, key: str = "ps", default=(2.0,)) -> list:
    if "p" in params and key == "ps":
        vals = params["p"] if isinstance(params["p"], (list, tuple)) else [params["p"]]
    else:
        vals = params.get(key, default)
    return [_parse_p(v) for v in vals]


def _pkey(p: float) -> str:
    return "inf" if math.isinf(p) else (str(int(p)) if float(p).is_integer() else repr(p))


def peak_constant(kind: str, alpha: float, k: int) -> float:
    """Peak over ``eps`` of the weighted ``J^k`` symbol at one frequency ``r``, divided by ``r^alpha``.

    For the Poisson form this is ``(2 pi)^alpha ((k - alpha)/e)^{k - alpha}``; the heat form
    has ``alpha/2`` in the exponents.  The block norm of the same frequency is about ``r^alpha``.
    """
    s = k - (alpha if kind == "poisson-eps" else alpha / 2.0)
    return (2 * math.pi) ** alpha * (s / math.e) ** s


def besov_equiv_k(kind: str, alpha: float, rule: str = "normalized") -> int:
    """``k`` used for each characterization.

    ``minimal`` is the smallest admissible ``k``.  ``normalized`` raises it for the
    eps-parametrized kinds until :func:`peak_constant` reaches 1/4.  The mean always
    has ratio 1, so a small peak constant alone stretches the spread of the ratio.
    """
    if rule not in ("minimal", "normalized"):
        raise ValueError(f"unknown k rule {rule!r}")
    if kind in ("poisson-eps", "circular-poisson", "diff"):
        k = int(math.floor(alpha)) + 1
    else:
        k = int(math.floor(alpha / 2.0)) + 1
    if rule == "normalized" and kind in ("poisson-eps", "heat-eps"):
        while peak_constant(kind, alpha, k) < 0.25:
            k += 1
    return k


def scalar_lp_norm(x: QElement, p, points: int = 1 << 15) -> float:
    """``||x||_p`` of a commutative element in d = 1 by dense periodic quadrature.

    The periodic trapezoid rule is used on a fine grid; for ``p = inf`` the
    grid maximum is polished by a bounded scalar search.
    """
    from scipy.optimize import minimize_scalar

    if x.d != 1 or np.any(x.theta.entries != 0):
        raise ValueError("the scalar oracle needs a commutative element in d = 1")
    p = _parse_p(p)
    m = x.freqs[:, 0].astype(float)
    c = x.vals

    def f(t):
        t = np.atleast_1d(t)
        return np.abs(np.exp(2j * math.pi * np.outer(t, m)) @ c)

    t = np.arange(points) / points
    vals = np.concatenate([f(t[i:i + 4096]) for i in range(0, points, 4096)])
    if math.isinf(p):
        i = int(np.argmax(vals))
        h = 1.0 / points
        res = minimize_scalar(lambda s: -float(f(s)[0]), bounds=(t[i] - h, t[i] + h), method="bounded",
                              options={"xatol": 1e-14})
        return float(max(vals[i], -res.fun))
    return float(np.mean(vals ** p) ** (1.0 / p))


def heat_smoothing_constant(d: int) -> float:
    """``sup_{0<r<1} (1-r)^{d/2} (sum_n r^{n^2})^d``, the L_1 -> L_inf constant of ``W_r``."""
    from scipy.optimize import minimize_scalar

    def val(s):  # r = 1 - e^{-s}
        r = -math.expm1(-s)
        n = np.arange(1, 4000)
        theta3 = 1.0 + 2.0 * float(np.sum(r ** (n * n)))
        return math.exp(-s * d / 2.0) * theta3 ** d

    grid = np.linspace(0.0, 12.0, 241)
    best = max(grid, key=val)
    res = minimize_scalar(lambda s: -val(s), bounds=(max(best - 0.05, 0.0), best + 0.05), method="bounded")
    return max(val(best), -res.fun)


# ------------------------------------------------------------------- suites
SuiteFn = Callable[[CorpusSpec, dict], InequalityReport]
SUITES: dict = {}


def _suite(name):
    def deco(fn):
        SUITES[name] = fn
        return fn
    return deco


@_suite("poincare")
def _poincare(spec: CorpusSpec, params: dict) -> InequalityReport:
    p = _ps(params)[0]
    ctrl = _ctrl(params)
    sharp = 1.0 / (2.0 * math.pi)
    tol = float(params.get("tol", 1e-10))
    bound = float(params.get("bound", sharp if p == 2 else 1.0))
    rep = InequalityReport("poincare", {"p": p}, bound={"upper": bound, "tol": tol})
    elements = {}
    corpus = [(i, random_element(spec, i)) for i in range(spec.sample_count)]
    theta = corpus[0][1].theta if corpus else spec.theta_matrix()
    for j in range(spec.d):
        e = np.zeros(spec.d, dtype=np.int64)
        e[j] = 1
        corpus.append((f"U_{j + 1}", monomial(theta, e)))
    for sid, x in corpus:
        elements[sid] = x
        _, x0 = strip_mean(x)
        ctx = NormContext(x0, ctrl)
        lhs = ctx.norm(None, p)
        rhs = sobolev_norm(x0, 1, p, seminorm_only=True, ctx=ctx).value
        ratio = lhs / rhs if rhs > 0 else 0.0
        rep.add(sid, f"p={_pkey(p)}", lhs, rhs, ratio <= bound * (1 + tol), ratio, {"p": p})
    if p == 2:
        top = max(r["ratio"] for r in rep.rows)
        attained = abs(top - sharp) <= tol * sharp
        rep.notes.append(f"max ratio {top!r}; sharp constant 1/(2 pi) = {sharp!r}; attained: {attained}")
        if not attained:
            rep.rows[-1]["ok"] = False
    _witness(rep, elements)
    return rep


@_suite("seminorm_monotone")
def _seminorm_monotone(spec, params):
    p = _ps(params)[0]
    k = int(params.get("k", 1))
    ctrl = _ctrl(params)
    bound = float(params.get("bound", 1.0 / (2 * math.pi) if p == 2 else 1.0))
    rep = InequalityReport("seminorm_monotone", {"p": p, "k": k}, bound={"upper": bound})
    elements = {}
    for i in range(spec.sample_count):
        _, x = strip_mean(random_element(spec, i))
        elements[i] = x
        ctx = NormContext(x, ctrl)
        lhs = sobolev_norm(x, k, p, True, ctx=ctx).value
        rhs = sobolev_norm(x, k + 1, p, True, ctx=ctx).value
        ratio = lhs / rhs if rhs > 0 else 0.0
        rep.add(i, f"k={k}|p={_pkey(p)}", lhs, rhs, ratio <= bound * (1 + 1e-12), ratio)
    _witness(rep, elements)
    return rep


@_suite("lifting")
def _lifting(spec, params):
    p = _ps(params)[0]
    q = _parse_p(params.get("q", 2))
    alpha = float(params.get("alpha", 0.5))
    beta = float(params.get("beta", 1.0))
    ctrl = _ctrl(params)
    spread = float(params.get("max_spread", 10.0))
    rep = InequalityReport("lifting", {"p": p, "q": q, "alpha": alpha, "beta": beta},
                           bound={"max_spread": spread})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        base = besov_norm(x, alpha, p, q, ctrl=ctrl).value
        lifted = besov_norm(apply(bessel_symbol(beta), x), alpha - beta, p, q, ctrl=ctrl).value
        rep.add(i, "bessel", lifted, base, True)
        _, x0 = strip_mean(x)
        if not x0.is_zero():
            b0 = besov_norm(x0, alpha, p, q, ctrl=ctrl).value
            l0 = besov_norm(apply(riesz_symbol(beta), x0), alpha - beta, p, q, ctrl=ctrl).value
            rep.add(i, "riesz", l0, b0, True)
    _witness(rep, elements)
    return rep


def _sandwich_bracket(x: QElement, alpha: float, profile) -> tuple:
    """Per-frequency range of ``(1+|m|^2)^alpha / (weighted block sum)`` on the support."""
    ks, table = block_coefficients(x, profile)
    r2 = np.sum(x.freqs.astype(float) ** 2, axis=1)
    num = (1.0 + r2) ** alpha
    den = np.where(r2 == 0, 1.0, 0.0)
    for k, row in zip(ks, table):
        den = den + 2.0 ** (2 * k * alpha) * row ** 2
    rho = num / den
    return float(np.sqrt(rho.min())), float(np.sqrt(rho.max()))


@_suite("sandwich")
def _sandwich(spec, params):
    p = _ps(params)[0]
    alpha = float(params.get("alpha", 0.5))
    ctrl = _ctrl(params)
    bound = float(params.get("bound", 10.0))
    profile = get_profile(params.get("profile"))
    rep = InequalityReport("sandwich", {"p": p, "alpha": alpha}, bound={"upper": bound})
    elements = {}
    qlo, qhi = min(p, 2.0), max(p, 2.0)
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        h = potential_norm(x, alpha, p, ctx=ctx).value
        b_lo = besov_norm(x, alpha, p, qlo, profile, ctx=ctx).value
        b_hi = besov_norm(x, alpha, p, qhi, profile, ctx=ctx).value
        if p == 2:
            lo, hi = _sandwich_bracket(x, alpha, profile)
            ratio = h / b_lo
            ok = lo * (1 - 1e-10) <= ratio <= hi * (1 + 1e-10)
            rep.add(i, "H/B22 within per-frequency bracket", h, b_lo, ok, ratio,
                    diag={"bracket": [lo, hi]})
        else:
            rep.add(i, "H <= C B_{p,min(p,2)}", h, b_lo, h / b_lo <= bound)
            rep.add(i, "B_{p,max(p,2)} <= C H", b_hi, h, b_hi / h <= bound)
    if p == 2:
        rep.notes.append("at p = 2 both norms are weighted Plancherel sums with different weights; "
                         "each ratio must lie in the exact per-frequency bracket")
    _witness(rep, elements)
    return rep


def _besov_equiv_sample(x, ctx, ps, qs, alphas, kinds, quad, dgrid, profile, profile_alt, k_rule="normalized"):
    """All ratios characterization / block norm for one element."""
    out = []
    mean = abs(x.mean())
    ks, blocks = besov_block_norms(x, ps, profile, ctx=ctx)
    ks2, blocks2 = besov_block_norms(x, ps, profile_alt, ctx=ctx) if profile_alt else (None, None)
    ref = {}
    for a in alphas:
        for j, p in enumerate(ps):
            for q in qs:
                ref[(a, p, q)] = besov_from_blocks(mean, ks, blocks[:, j] if len(ks) else [], a, q)[0]
                if profile_alt is not None:
                    alt = besov_from_blocks(mean, ks2, blocks2[:, j] if len(ks2) else [], a, q)[0]
                    out.append(("profile", 0, a, p, q, alt, ref[(a, p, q)]))
    semigroup_kinds = [kd for kd in kinds if kd != "diff"]
    needed = {}
    for kd in semigroup_kinds:
        for a in alphas:
            needed.setdefault((kd, besov_equiv_k(kd, a, k_rule)), []).append(a)
    for (kd, k), alist in sorted(needed.items()):
        prof = semigroup_profile(x, kd, k, ps, quad, ctx=ctx)
        for a in alist:
            for p in ps:
                for q in qs:
                    out.append((kd, k, a, p, q, prof.aggregate(a, p, q)[0], ref[(a, p, q)]))
    if "diff" in kinds:
        eps, w = quad.nodes()
        by_k = {}
        for a in alphas:
            if a > 0:
                by_k.setdefault(besov_equiv_k("diff", a), []).append(a)
        for k, alist in sorted(by_k.items()):
            mp = modulus_profile(x, k, eps, ps, dgrid, ctx=ctx)
            for a in alist:
                for j, p in enumerate(ps):
                    om = mp.omega[j]
                    for q in qs:
                        if math.isinf(q):
                            body = float(np.max(eps ** (-a) * om))
                            val = max(mean, body)
                        else:
                            val = (mean ** q + _diff_integral(eps, w, om, a, q, k, quad.eps_min)) ** (1.0 / q)
                        out.append(("diff", k, a, p, q, val, ref[(a, p, q)]))
    return out


@_suite("besov_equiv")
def _besov_equiv(spec, params):
    ps = _ps(params, default=(2.0,))
    qs = [_parse_p(v) for v in params.get("qs", [2])]
    alphas = [float(a) for a in params.get("alphas", [0.5])]
    kinds = list(params.get("kinds", ["poisson-eps", "heat-eps", "circular-poisson", "circular-heat", "diff"]))
    spread = float(params.get("max_spread", 10.0))
    quad = QuadratureGrid(n_points=int(params.get("nodes", 32)), eps_min=float(params.get("eps_min", 1e-4)),
                          order=int(params.get("order", 8)), refine=False)
    ndir = int(params.get("directions", 16))
    dgrid = default_grid(spec.d, ndir, 1)
    dgrid = type(dgrid)(dgrid.sphere_points, (1.0,))
    profile = get_profile(params.get("profile", "bump"))
    alt = params.get("profile_alt", "bump-shifted")
    profile_alt = get_profile(alt) if alt else None
    k_rule = params.get("k_rule", "normalized")
    ctrl = _ctrl(params)
    rep = InequalityReport("besov_equiv", {"ps": ps, "qs": qs, "alphas": alphas, "kinds": kinds, "k_rule": k_rule,
                                           "quadrature": quad.to_dict(), "directions": ndir,
                                           "lp": ctrl.to_dict()}, bound={"max_spread": spread})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        for kd, k, a, p, q, lhs, rhs in _besov_equiv_sample(x, ctx, ps, qs, alphas, kinds, quad, dgrid,
                                                           profile, profile_alt, k_rule):
            g = f"{kd}|k={k}|alpha={a!r}|p={_pkey(p)}|q={_pkey(q)}"
            rep.add(i, g, lhs, rhs, math.isfinite(lhs) and lhs > 0, None,
                    {"kind": kd, "k": k, "alpha": a, "p": p, "q": q})
    rep.notes.append("ratio = characterization / block norm; the equivalence constants are existential, "
                     "so only the spread max/min per parameter group is bounded")
    _witness(rep, elements)
    return rep


@_suite("triebel_equiv")
def _triebel_equiv(spec, params):
    ps = _ps(params, default=(2.0,))
    alphas = [float(a) for a in params.get("alphas", [0.5])]
    methods = list(params.get("methods", ["poisson-eps", "heat-eps", "circular-poisson", "circular-heat", "hardy"]))
    spread = float(params.get("max_spread", 10.0))
    k_rule = params.get("k_rule", "normalized")
    quad = QuadratureGrid(n_points=int(params.get("nodes", 32)), eps_min=float(params.get("eps_min", 1e-4)),
                          order=int(params.get("order", 8)), refine=False)
    ctrl = _ctrl(params)
    rep = InequalityReport("triebel_equiv", {"ps": ps, "alphas": alphas, "methods": methods, "k_rule": k_rule,
                                             "quadrature": quad.to_dict(), "lp": ctrl.to_dict()},
                           bound={"max_spread": spread})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        for p in ps:
            refs = {}
            for a in set(alphas) | ({0.0} if "hardy" in methods else set()):
                refs[a] = triebel_norm(x, a, p, "column", ctrl=ctrl).value
            for m in methods:
                if m == "hardy":
                    val = hardy_norm(x, p, ctrl, quad).value
                    rep.add(i, f"hardy|alpha=0.0|p={_pkey(p)}", val, refs[0.0], val > 0, None,
                            {"method": m, "alpha": 0.0, "p": p})
                    continue
                for a in alphas:
                    k = besov_equiv_k(m, a, k_rule)
                    val = triebel_norm_poisson(x, a, p, k, quad, m, "column", ctrl).value
                    rep.add(i, f"{m}|k={k}|alpha={a!r}|p={_pkey(p)}", val, refs[a], val > 0, None,
                            {"method": m, "k": k, "alpha": a, "p": p})
    _witness(rep, elements)
    return rep


@_suite("besov_embedding")
def _besov_embedding(spec, params):
    p = _parse_p(params.get("p", 1))
    p1 = _parse_p(params.get("p1", "inf"))
    q = _parse_p(params.get("q", 2))
    alpha = float(params.get("alpha", 1.5))
    bound = float(params.get("bound", 16.0))
    if not p <= p1:
        raise ValueError("the embedding needs p <= p1")
    inv = lambda v: 0.0 if math.isinf(v) else 1.0 / v  # noqa: E731
    alpha1 = alpha - spec.d * inv(p) + spec.d * inv(p1)
    ctrl = _ctrl(params)
    rep = InequalityReport("besov_embedding", {"p": p, "p1": p1, "q": q, "alpha": alpha, "alpha1": alpha1},
                           bound={"upper": bound})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        ks, blocks = besov_block_norms(x, [p, p1], ctx=ctx)
        big = besov_from_blocks(x.mean(), ks, blocks[:, 1] if len(ks) else [], alpha1, q)[0]
        small = besov_from_blocks(x.mean(), ks, blocks[:, 0] if len(ks) else [], alpha, q)[0]
        rep.add(i, f"p={_pkey(p)}->p1={_pkey(p1)}", big, small, big <= bound * small)
    _witness(rep, elements)
    return rep


@_suite("heat_smoothing")
def _heat_smoothing(spec, params):
    p = _parse_p(params.get("p", 1))
    p1 = _parse_p(params.get("p1", "inf"))
    rs = [float(r) for r in params.get("rs", [0.1, 0.5, 0.9, 0.99])]
    slack = float(params.get("slack", 1.05))
    inv = lambda v: 0.0 if math.isinf(v) else 1.0 / v  # noqa: E731
    if not p <= p1:
        raise ValueError("heat smoothing needs p <= p1")
    cd = heat_smoothing_constant(spec.d)
    bound = float(params.get("bound", cd ** (inv(p) - inv(p1))))
    ctrl = _ctrl(params)
    rep = InequalityReport("heat_smoothing", {"p": p, "p1": p1, "rs": rs},
                           bound={"upper": bound, "slack": slack, "L1_to_Linf_constant": cd})
    rep.notes.append("bound: the L_1 -> L_inf norm of W_r is at most sum_m r^{|m|^2}; interpolating with "
                     "the L_s contraction gives the constant to the power 1/p - 1/p1")
    elements = {}
    from .multipliers import circular_semigroup_symbol
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        xn = ctx.norm(None, p)
        syms = np.array([circular_semigroup_symbol("heat", r, 0).evaluate(x.freqs) for r in rs])
        vals = ctx.norms(syms, [p1])[:, 0]
        for r, v in zip(rs, vals):
            rhs = (1 - r) ** ((spec.d / 2.0) * (inv(p1) - inv(p))) * xn
            rep.add(i, f"r={r!r}", v, rhs, v <= slack * bound * rhs, None, {"r": r})
    _witness(rep, elements)
    return rep


def _kernel_l1(d: int, freqs: np.ndarray, vals: np.ndarray, grid: int = 64) -> float:
    """``int_{T^d} |sum_m c_m z^m| dz`` on a uniform grid (an upper bound for the multiplier norm)."""
    arr = np.zeros((grid,) * d, dtype=complex)
    for m, c in zip(freqs, vals):
        arr[tuple(int(v) % grid for v in m)] += c
    return float(np.mean(np.abs(np.fft.ifftn(arr) * grid ** d)))


@_suite("multiplier_besov")
def _multiplier_besov(spec, params):
    p = _parse_p(params.get("p", 2))
    q = _parse_p(params.get("q", 2))
    alpha = float(params.get("alpha", 0.5))
    ctrl = _ctrl(params)
    c_low = 9.0 * 4.0 ** abs(alpha)
    c_up = 3.0 * 2.0 ** abs(alpha)
    profile = get_profile(params.get("profile"))
    rep = InequalityReport("multiplier_besov", {"p": p, "q": q, "alpha": alpha},
                           bound={"upper": 1.0, "c_alpha": c_low, "upper_constant": c_up})
    rep.notes.append("operator norms are replaced by per-sample ratios on sampled (phi, x); "
                     "this tests the inequalities on samples and cannot certify the supremum")
    if p != 2:
        rep.notes.append("for p != 2 the multiplier norm of phi*phi_k is bounded above by the L_1 norm of its kernel")
    elements = {}
    slack = 1.0 + float(params.get("tol", 1e-9 if p == 2 else 0.05))
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        rng = np.random.default_rng([int(spec.seed), int(i), 7])
        phi = random_symbol_table(spec.d, spec.max_degree + 1, rng)
        mx = apply(phi, x)
        ks, table = block_coefficients(x, profile)
        x_ctx = NormContext(x, ctrl)
        xp = x_ctx.norm(None, p)
        # direction (i): per block k
        for idx, k in enumerate(ks):
            three = np.zeros(len(x))
            for j in (k - 1, k, k + 1):
                if j >= 0:
                    three += profile.phi(np.sqrt(np.sum(x.freqs.astype(float) ** 2, axis=1)) * 2.0 ** (-j))
            y = x.with_values(x.vals * three)
            if y.is_zero():
                continue
            yb = besov_norm(y, alpha, p, q, profile, ctrl=ctrl).value
            rep.add(i, "||y||_B <= c_alpha 2^{k alpha} ||x||_p", yb, c_low * 2 ** (k * alpha) * xp,
                    yb <= slack * c_low * 2 ** (k * alpha) * xp, params={"k": k})
            lhs = 2 ** (k * alpha) * x_ctx.norm(phi.evaluate(x.freqs) * table[idx], p)
            rhs = besov_norm(apply(phi, y), alpha, p, q, profile, ctrl=ctrl).value
            rep.add(i, "2^{k alpha}||M_{phi phi_k} x||_p <= ||M_phi y||_B", lhs, rhs,
                    lhs <= slack * rhs, params={"k": k})
        # direction (ii)
        if ks:
            sups = []
            box = _box(spec.d, spec.max_degree + 1)
            pv = phi.evaluate(box)
            rb = np.sqrt(np.sum(box.astype(float) ** 2, axis=1))
            for k in ks:
                pk = pv * profile.phi(rb * 2.0 ** (-k))
                sups.append(float(np.max(np.abs(pk))) if p == 2 else _kernel_l1(spec.d, box, pk))
            S = max(sups)
            lhs = besov_norm(mx, alpha, p, q, profile, ctrl=ctrl).value
            xb = besov_norm(x, alpha, p, q, profile, ctx=x_ctx).value
            rhs = c_up * S * xb
            rep.add(i, "||M_phi x||_B <= 3 2^{|alpha|} sup_k ||phi phi_k|| ||x||_B", lhs, rhs,
                    lhs <= slack * rhs, diag={"S": S})
    _witness(rep, elements)
    return rep


@_suite("schur_identity")
def _schur_identity(spec, params):
    N = int(params.get("N", 8))
    tol = float(params.get("tol", 1e-12))
    rep = InequalityReport("schur_identity", {"N": N}, bound={"upper": tol})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        rng = np.random.default_rng([int(spec.seed), int(i), 11])
        phi = random_symbol_table(spec.d, 2 * N, rng)
        W = TruncationWindow(spec.d, N).index_set
        diff = W[:, None, :] - W[None, :, :]
        sym = phi.evaluate(diff.reshape(-1, spec.d)).reshape(W.shape[0], W.shape[0])
        a = to_matrix(x, N).entries
        b = to_matrix(apply(phi, x), N).entries
        dev = float(np.max(np.abs(b - sym * a)))
        rep.add(i, "Schur identity", dev, tol, dev <= tol, dev / tol)
        # entry formula via the explicit upper-triangular phase matrix
        coeff = {tuple(m): c for m, c in x.coeffs.items()}
        tilde = x.theta.tilde
        dd = diff.reshape(-1, spec.d)
        xhat = np.array([coeff.get(tuple(int(v) for v in m), 0j) for m in dd]).reshape(a.shape)
        ph = np.einsum("nj,jk,mnk->mn", W.astype(float), tilde, diff.astype(float))
        dev2 = float(np.max(np.abs(a - xhat * np.exp(1j * ph))))
        rep.add(i, "matrix entry formula", dev2, tol, dev2 <= tol, dev2 / tol)
    _witness(rep, elements)
    return rep


def _limit_suite(name, end, default_alphas):
    def run(spec, params):
        p = _ps(params)[0]
        q = _parse_p(params.get("q", 2))
        k = int(params.get("k", 1))
        alphas = [float(a) for a in params.get("alphas", default_alphas)]
        lo, hi = params.get("bracket", [0.25, 4.0])
        ctrl = _ctrl(params)
        quad = QuadratureGrid(n_points=int(params.get("nodes", 160)), eps_min=float(params.get("eps_min", 1e-5)),
                              refine=False)
        grid = default_grid(spec.d, int(params.get("directions", 64)), int(params.get("radii", 8)))
        rep = InequalityReport(name, {"p": p, "q": q, "k": k, "alphas": alphas},
                               bound={"last_ratio_in": [lo, hi], "cauchy_decreasing": True})
        elements = {}
        for i in range(spec.sample_count):
            x = random_element(spec, i)
            elements[i] = x
            rows = limit_scan(x, k, p, q, end, alphas, grid, quad, ctrl=ctrl)
            steps = [r["step"] for r in rows[1:]]
            cauchy = all(steps[j + 1] < steps[j] for j in range(len(steps) - 1))
            last = rows[-1]
            ok = cauchy and lo <= last["ratio"] <= hi
            rep.add(i, end, last["scaled"], last["target"], ok, last["ratio"],
                    diag={"scaled": [r["scaled"] for r in rows], "cauchy_decreasing": cauchy})
        _witness(rep, elements)
        return rep
    return run


SUITES["bbm"] = _limit_suite("bbm", "alpha_to_k", [0.9, 0.99, 0.999])
SUITES["ms_limit"] = _limit_suite("ms_limit", "alpha_to_0", [0.1, 0.01, 0.001])


@_suite("kfunc")
def _kfunc(spec, params):
    k = int(params.get("k", 1))
    ts = [float(t) for t in params.get("ts", [2.0 ** -j for j in range(0, 9)])]
    eps_list = [float(e) for e in params.get("eps", [2.0 ** -j for j in range(1, 9)])]
    spread = float(params.get("max_spread", 10.0))
    tol = float(params.get("tol", 1e-8))
    grid = default_grid(spec.d, int(params.get("directions", 64)), int(params.get("radii", 8)))
    ctrl = _ctrl(params)
    rep = InequalityReport("kfunc", {"k": k, "ts": ts, "eps": eps_list},
                           bound={"oracle_tol": tol, "max_spread": spread})
    elements = {}
    agrid = np.linspace(0.0, 1.0, 200001)
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        from .smoothness import _w2
        w2 = _w2(x, k)
        for t in ts:
            k2 = k2_oracle(x, t, k)
            # brute force: minimize a^2 + t^2 w^2 (1-a)^2 over a grid for each frequency
            tw = (t * t) * w2
            best = np.array([np.min(agrid ** 2 + c * (1 - agrid) ** 2) for c in tw])
            brute = float(math.sqrt(np.sum(np.abs(x.vals) ** 2 * best)))
            dev = abs(brute - k2)
            rep.add(i, "oracle vs brute force", dev, tol, dev <= tol * max(1.0, k2), dev / tol, {"t": t})
            cert = k_functional(x, t, k, 2, "upper_certificate", ctx=ctx)["value"]
            rep.add(i, "certificate >= K2", k2, cert, k2 <= cert * (1 + 1e-12), None, {"t": t})
        for row in k_functional(x, 1.0, k, 2, "equivalence_check", grid, eps_list, ctx=ctx)["rows"]:
            rep.add(i, "equivalence (eps^k|x(0)| + omega) / K2", row["lhs"], row["K2"],
                    math.isfinite(row["ratio"]), row["ratio"], {"eps": row["eps"]})
    # only the equivalence group is spread-bounded
    rep.bound["spread_groups"] = ["equivalence (eps^k|x(0)| + omega) / K2"]
    _witness(rep, elements)
    return rep


@_suite("marchaud")
def _marchaud(spec, params):
    p = _ps(params)[0]
    pairs = [tuple(v) for v in params.get("pairs", [(1, 2), (1, 3), (2, 3)])]
    eps_list = [float(e) for e in params.get("eps", [2.0 ** -j for j in range(1, 7)])]
    slack = float(params.get("slack", 1.05))
    grid = default_grid(spec.d, int(params.get("directions", 64)), int(params.get("radii", 8)))
    ctrl = _ctrl(params)
    rep = InequalityReport("marchaud", {"p": p, "pairs": pairs, "eps": eps_list}, bound={"slack": slack})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        for n, N in pairs:
            res = marchaud_check(x, n, N, p, eps_list, grid, ctx=ctx, slack=slack)
            for r in res["rows"]:
                rep.add(i, f"(n,N)=({n},{N})", r["lower_lhs"], r["omega_n"], r["ok"], r["ratio"],
                        {"eps": r["eps"]}, {"upper": r["upper"], "upper_ratio": r["upper_ratio"]})
    _witness(rep, elements)
    return rep


@_suite("lipschitz")
def _lipschitz(spec, params):
    p = _ps(params)[0]
    k = int(params.get("k", 1))
    eps_list = [float(e) for e in params.get("eps", [2.0 ** -j for j in range(0, 10)])]
    slack = float(params.get("slack", 1.05))
    grid = default_grid(spec.d, int(params.get("directions", 64)), int(params.get("radii", 8)))
    ctrl = _ctrl(params)
    rep = InequalityReport("lipschitz", {"p": p, "k": k, "eps": eps_list}, bound={"increasing_slack": slack})
    elements = {}
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        res = lipschitz_ratio(x, k, p, eps_list, grid, ctrl=ctrl, slack=slack)
        last = res["rows"][-1]
        rep.add(i, f"k={k}", last["omega_over_eps_k"], res["seminorm"], res["increasing"], last["ratio"],
                diag={"sequence": [r["omega_over_eps_k"] for r in res["rows"]]})
    _witness(rep, elements)
    return rep


@_suite("interpolation")
def _interpolation(spec, params):
    p = _ps(params)[0]
    ctrl = _ctrl(params)
    rep = InequalityReport("interpolation", {"p": p}, bound={"upper": 1.0, "constant": 2.0})
    elements = {}
    from .multipliers import derivative_symbol
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        xn = ctx.norm(None, p)
        for j in range(spec.d):
            e1 = [0] * spec.d
            e1[j] = 1
            e2 = [0] * spec.d
            e2[j] = 2
            d1 = ctx.norm(derivative_symbol(e1).evaluate(x.freqs), p)
            d2 = ctx.norm(derivative_symbol(e2).evaluate(x.freqs), p)
            rhs = 2.0 * math.sqrt(xn * d2)
            rep.add(i, f"j={j + 1}", d1, rhs, d1 <= rhs * (1 + 1e-12), None, {"j": j + 1})
    _witness(rep, elements)
    return rep


@_suite("poincare_second_order")
def _poincare2(spec, params):
    p = _ps(params)[0]
    j = int(params.get("axis", 0))
    const = 2.0 * math.pi ** 2 / (9.0 * math.sqrt(3.0))
    ctrl = _ctrl(params)
    rep = InequalityReport("poincare_second_order", {"p": p, "axis": j}, bound={"constant": const})
    local = CorpusSpec(**{**spec.to_dict(), "avoid_axis": j, "theta": spec.theta})
    elements = {}
    from .multipliers import derivative_symbol
    for i in range(local.sample_count):
        x = random_element(local, i)
        elements[i] = x
        ctx = NormContext(x, ctrl)
        e2 = [0] * spec.d
        e2[j] = 2
        lhs = ctx.norm(None, p)
        rhs = const * ctx.norm(derivative_symbol(e2).evaluate(x.freqs), p)
        rep.add(i, f"axis={j + 1}", lhs, rhs, lhs <= rhs * (1 + 1e-12))
    _witness(rep, elements)
    return rep


@_suite("commutative_oracle")
def _commutative(spec, params):
    ps = _ps(params, default=(1.0, 2.0, 4.0, math.inf))
    tol = float(params.get("tol", 1e-4))
    # d = 1 windows are cheap; two large levels feed the p = inf Richardson step and the
    # central estimator handles finite p
    levels = params.get("levels", [128, 256])
    ctrl = LpControl(tol=float(params.get("lp_tol", 1e-4)), levels=tuple(levels),
                     max_size=int(params.get("max_size", 1200)),
                     estimator=params.get("estimator", "central"))
    local = CorpusSpec(**{**spec.to_dict(), "d": 1, "theta": 0.0, "theta_law": "fixed"})
    rep = InequalityReport("commutative_oracle", {"ps": ps, "lp": ctrl.to_dict()}, bound={"relative_tol": tol})
    elements = {}
    for i in range(local.sample_count):
        x = random_element(local, i)
        elements[i] = x
        for p in ps:
            res = lp_norm(x, p, ctrl)
            ref = scalar_lp_norm(x, p)
            dev = abs(res.value - ref) / ref
            rep.add(i, f"p={_pkey(p)}", dev, tol, dev <= tol, dev / tol, {"p": p},
                    {"value": res.value, "oracle": ref, **res.diagnostics()})
            rep.nonconverged += not res.converged
    _witness(rep, elements)
    return rep


def run_suite(name: str, corpus: CorpusSpec, params: dict | None = None) -> InequalityReport:
    """Run a named suite over ``corpus``."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise UnknownSuiteError(f"unknown suite {name!r}; known: {sorted(SUITES)}") from None
    params = dict(params or {})
    rep = fn(corpus, params)
    rep.corpus = corpus.to_dict()
    return rep
