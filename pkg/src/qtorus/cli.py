"""Command-line interface: ``qtorus gen | norm | check | sweep | info``.

Every command accepts ``--config FILE`` with a JSON object whose keys are the
command's option names (dashes or underscores); flags given on the command
line override the file.  Exit codes: 0 pass, 1 mathematical failure,
2 usage or configuration error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import QElement, ThetaMatrix, element_from_json, element_to_json
from .matrix_rep import LpControl, WindowBudgetError, _parse_p, lp_norm
from .multipliers import DomainError, apply, parse_symbol
from .spaces import (
    ConstraintError,
    QuadratureGrid,
    besov_norm,
    besov_norm_semigroup,
    hardy_norm,
    potential_norm,
    riesz_potential_norm,
    sobolev_norm,
    triebel_norm,
    triebel_norm_poisson,
)
from .smoothness import besov_diff_norm
from .verify import SUITES, CorpusSpec, UnknownSuiteError, random_element, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3
log = logging.getLogger("qtorus")


class UsageError(Exception):
    pass


def write_atomic(path: Path, text: str):
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _kv_list(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


# ----------------------------------------------------------------- parsers
def _corpus_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("corpus")
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--theta", type=float, default=None, help="angle for every pair k > j")
    g.add_argument("--theta-law", choices=["fixed", "random-skew"], default="fixed")
    g.add_argument("--deg", type=int, default=2, help="maximal degree of the frequency box")
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--coef-law", choices=["complex-gaussian", "unit-circle"], default="complex-gaussian")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=20, help="sample count")


def _lp_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("truncation")
    g.add_argument("--levels", type=int, nargs="+", default=None, help="explicit truncation levels")
    g.add_argument("--max-size", type=int, default=2500, help="budget on the matrix side")
    g.add_argument("--lp-tol", type=float, default=1e-3)
    g.add_argument("--estimator", choices=["extrapolate", "central"], default=None,
                   help="finite-p estimator for L_p norms (default: extrapolate)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtorus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qtorus {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command")

    gen = sub.add_parser("gen", help="write random elements as JSON files")
    gen.add_argument("--config")
    _corpus_args(gen)
    gen.add_argument("--prune-tol", type=float, default=0.0)
    gen.add_argument("--out", default="elements")

    norm = sub.add_parser("norm", help="evaluate a norm of an element file")
    norm.add_argument("--config")
    norm.add_argument("element")
    norm.add_argument("--space", default=None,
                      choices=["lp", "sobolev", "potential", "riesz-potential", "besov", "triebel", "hardy"])
    norm.add_argument("--method", default="blocks",
                      choices=["blocks", "poisson-eps", "heat-eps", "circular-poisson", "circular-heat", "diff"])
    norm.add_argument("--p", default="2")
    norm.add_argument("--q", default="2")
    norm.add_argument("--alpha", type=float, default=0.0)
    norm.add_argument("--k", type=int, default=None)
    norm.add_argument("--seminorm", action="store_true")
    norm.add_argument("--profile", default="bump")
    norm.add_argument("--flavor", default="column", choices=["column", "row", "mixture"])
    norm.add_argument("--multiplier", action="append", default=[], help="apply a named multiplier first")
    norm.add_argument("--strip-low", action="store_true",
                      help="circular Poisson: move frequencies |m| < k to the head term instead of failing")
    norm.add_argument("--nodes", type=int, default=None, help="quadrature nodes")
    norm.add_argument("--prune-tol", type=float, default=0.0)
    norm.add_argument("--json", action="store_true")
    _lp_args(norm)

    check = sub.add_parser("check", help="run a named suite")
    check.add_argument("--config")
    check.add_argument("--suite", default=None)
    _corpus_args(check)
    check.add_argument("--p", default=None)
    check.add_argument("--q", default=None)
    check.add_argument("--alpha", type=float, default=None)
    check.add_argument("--k", type=int, default=None)
    check.add_argument("--param", action="append", default=[], help="suite parameter key=JSON")
    check.add_argument("--out", default="reports")
    _lp_args(check)

    sweep = sub.add_parser("sweep", help="run a suite over the product of parameter lists")
    sweep.add_argument("--config")
    sweep.add_argument("--suite", default=None)
    _corpus_args(sweep)
    sweep.add_argument("--grid", action="append", default=[], help="key=JSON list")
    sweep.add_argument("--param", action="append", default=[])
    sweep.add_argument("--out", default="sweep")
    _lp_args(sweep)

    info = sub.add_parser("info", help="describe an element file")
    info.add_argument("--config")
    info.add_argument("element")
    return parser


def parse_args(argv) -> argparse.Namespace:
    """Parse twice: once to find the subcommand and config, once with config defaults."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        raise UsageError("a command is required")
    cfg = _load_config(getattr(args, "config", None))
    if cfg:
        subparser = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
        known = {a.dest for a in subparser._actions}  # noqa: SLF001
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {unknown}")
        subparser.set_defaults(**cfg)
        args = parser.parse_args(argv)
    for flag in ("suite", "space"):
        if hasattr(args, flag) and getattr(args, flag) is None:
            raise UsageError(f"--{flag} is required (flag or config key)")
    return args


def _config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "verbose")}


def _corpus_from(args) -> CorpusSpec:
    theta = 0.6180339887498949 if args.theta is None else args.theta
    return CorpusSpec(d=args.d, max_degree=args.deg, support_density=args.density,
                      coefficient_law=args.coef_law, theta_law=args.theta_law, seed=args.seed,
                      sample_count=args.n, theta=theta)


def _ctrl_from(args) -> LpControl:
    return LpControl(tol=args.lp_tol, levels=tuple(args.levels) if args.levels else None, max_size=args.max_size,
                     estimator=args.estimator or "extrapolate")


# ---------------------------------------------------------------- commands
def cmd_gen(args) -> int:
    spec = _corpus_from(args)
    out = Path(args.out)
    width = max(4, len(str(max(spec.sample_count - 1, 0))))
    for i in range(spec.sample_count):
        x = random_element(spec, i)
        if args.prune_tol:
            x = QElement.from_arrays(x.theta, x.freqs, x.vals, prune_tol=args.prune_tol)
        write_atomic(out / f"element_{i:0{width}d}.json", element_to_json(x) + "\n")
    write_atomic(out / "corpus.json", json.dumps({"version": __version__, "corpus": spec.to_dict(),
                                                  "config": _config_of(args)}, indent=1, sort_keys=True) + "\n")
    print(f"wrote {spec.sample_count} elements to {out}")
    return EXIT_PASS


def _read_element(path: str, prune_tol: float = 0.0):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read element {path}: {exc}") from None
    try:
        return element_from_json(text, prune_tol)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed element file {path}: {exc}") from None


def _evaluate_norm(args, x):
    """Return ``(NormResult-like dict, converged)``."""
    p = _parse_p(args.p)
    q = _parse_p(args.q)
    ctrl = _ctrl_from(args)
    alpha = args.alpha
    space, method = args.space, args.method
    quad = QuadratureGrid(n_points=args.nodes) if args.nodes else None
    if space == "lp":
        res = lp_norm(x, p, ctrl)
        return {"value": res.value, "breakdown": {}, "diagnostics": res.diagnostics()}, res.converged
    if space == "sobolev":
        k = 1 if args.k is None else args.k
        return sobolev_norm(x, k, p, args.seminorm, ctrl).to_dict(), True
    if space == "potential":
        return potential_norm(x, alpha, p, ctrl).to_dict(), True
    if space == "riesz-potential":
        return riesz_potential_norm(x, alpha, p, ctrl).to_dict(), True
    if space == "hardy":
        return hardy_norm(x, p, ctrl, quad, args.flavor).to_dict(), True
    k = args.k
    if method in ("circular-poisson",) and not args.strip_low:
        kk = k if k is not None else int(math.floor(alpha)) + 1
        r = np.sqrt(np.sum(x.freqs.astype(float) ** 2, axis=1))
        if kk >= 1 and np.any(r < kk):
            raise ConstraintError(
                f"the circular Poisson form with k={kk} acts on x_k, the element with the frequencies "
                f"|m| < k removed; this element has such frequencies (pass --strip-low to treat them "
                f"as the head term)")
    if space == "besov":
        if method == "blocks":
            return besov_norm(x, alpha, p, q, args.profile, ctrl).to_dict(), True
        if method == "diff":
            kk = k if k is not None else int(math.floor(alpha)) + 1
            return besov_diff_norm(x, alpha, p, q, kk, quad=quad, ctrl=ctrl).to_dict(), True
        kk = k if k is not None else (int(math.floor(alpha)) + 1 if "poisson" in method
                                     else int(math.floor(alpha / 2)) + 1)
        res = besov_norm_semigroup(x, alpha, p, q, method, kk, quad, ctrl)
        return res.to_dict(), bool(res.diagnostics.get("quadrature_converged", True))
    # triebel
    if method == "blocks":
        return triebel_norm(x, alpha, p, args.flavor, args.profile, ctrl).to_dict(), True
    if method == "diff":
        raise UsageError("the difference characterization is available for Besov norms only")
    kk = k if k is not None else (int(math.floor(alpha)) + 1 if "poisson" in method
                                 else int(math.floor(alpha / 2)) + 1)
    return triebel_norm_poisson(x, alpha, p, kk, quad, method, args.flavor, ctrl).to_dict(), True


def cmd_norm(args) -> int:
    x = _read_element(args.element, args.prune_tol)
    for spec in args.multiplier:
        x = apply(parse_symbol(spec, x.d), x)
    result, converged = _evaluate_norm(args, x)
    result = dict(result)
    result["config"] = _config_of(args)
    result["version"] = __version__
    if args.json:
        print(json.dumps(_json_safe(result), indent=1, sort_keys=True))
    else:
        print(f"{result['value']:.12g}")
        for k, v in sorted(result.get("diagnostics", {}).items()):
            if k != "history":
                print(f"  {k}: {v}")
    if not converged:
        log.warning("truncation or quadrature did not converge")
        return EXIT_NONCONVERGED
    return EXIT_PASS


def _json_safe(obj):
    from .verify import _clean
    return _clean(obj)


def _suite_params(args) -> dict:
    params = {}
    for key in ("p", "q", "alpha", "k"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = _parse_value(v) if isinstance(v, str) else v
    if args.levels:
        params["levels"] = list(args.levels)
    params["max_size"] = args.max_size
    if args.estimator:
        params["estimator"] = args.estimator
    params.update(_kv_list(args.param))
    return params


def _run_and_write(suite: str, spec: CorpusSpec, params: dict, out: Path, config: dict) -> int:
    rep = run_suite(suite, spec, params)
    rep.config = config
    write_atomic(out / f"{suite}.csv", rep.to_csv())
    write_atomic(out / f"{suite}.summary.json", rep.summary_json() + "\n")
    s = rep.summary()
    r = s["ratio_summary"]
    print(f"{suite}: {rep.verdict} ({s['rows']} rows, {s['failed_rows']} failed"
          + (f", ratio min {r['min']:.6g} median {r['median']:.6g} max {r['max']:.6g}" if r else "") + ")")
    for note in rep.notes:
        print(f"  note: {note}")
    if not rep.passed:
        return EXIT_FAIL
    if rep.nonconverged:
        return EXIT_NONCONVERGED
    return EXIT_PASS


def cmd_check(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(sorted(SUITES))}")
    return _run_and_write(args.suite, _corpus_from(args), _suite_params(args), Path(args.out), _config_of(args))


def cmd_sweep(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(sorted(SUITES))}")
    grid = _kv_list(args.grid)
    for key, vals in grid.items():
        if not isinstance(vals, list) or not vals:
            raise UsageError(f"grid entry {key} must be a nonempty JSON list")
    base = _suite_params(args)
    spec = _corpus_from(args)
    keys = sorted(grid)
    codes = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        params = dict(base)
        params.update(dict(zip(keys, combo)))
        tag = "_".join(f"{k}-{json.dumps(v, separators=(',', ''))}" for k, v in zip(keys, combo)) or "base"
        tag = re.sub(r"[^A-Za-z0-9.,_-]", "", tag)
        config = _config_of(args)
        config["point"] = dict(zip(keys, combo))
        codes.append(_run_and_write(args.suite, spec, params, Path(args.out) / tag, config))
    if EXIT_FAIL in codes:
        return EXIT_FAIL
    return EXIT_NONCONVERGED if EXIT_NONCONVERGED in codes else EXIT_PASS


def cmd_info(args) -> int:
    x = _read_element(args.element)
    theta: ThetaMatrix = x.theta
    print(f"d: {x.d}")
    print("theta:")
    for row in theta.entries:
        print("  " + " ".join(f"{v: .12g}" for v in row))
    print(f"support size: {len(x)}")
    print(f"degree: {x.degree()}")
    print(f"mean: {x.mean()}")
    return EXIT_PASS


COMMANDS = {"gen": cmd_gen, "norm": cmd_norm, "check": cmd_check, "sweep": cmd_sweep, "info": cmd_info}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return EXIT_PASS if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        print(f"qtorus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, UnknownSuiteError, ConstraintError, DomainError, WindowBudgetError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"qtorus: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
