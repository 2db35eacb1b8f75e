from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest

from qtorus.algebra import ThetaMatrix, element_from_dict, monomial
from qtorus.verify import (
    CSV_COLUMNS,
    SUITES,
    CorpusSpec,
    InequalityReport,
    UnknownSuiteError,
    besov_equiv_k,
    peak_constant,
    generate_corpus,
    random_element,
    run_suite,
    scalar_lp_norm,
)


def test_corpus_is_deterministic():
    spec = CorpusSpec(seed=3, sample_count=4)
    a = generate_corpus(spec)
    b = generate_corpus(spec)
    assert all(x == y for x, y in zip(a, b))
    assert random_element(spec, 2) == a[2]
    assert random_element(CorpusSpec(seed=4), 2) != a[2]


def test_same_seed_gives_identical_csv_bytes():
    spec = CorpusSpec(seed=1, sample_count=4)
    one = run_suite("poincare", spec, {"levels": [3]}).to_csv()
    two = run_suite("poincare", spec, {"levels": [3]}).to_csv()
    assert one.encode() == two.encode()
    header = next(csv.reader(io.StringIO(one)))
    assert tuple(header) == CSV_COLUMNS


def test_support_box_and_mean_free():
    spec = CorpusSpec(d=3, max_degree=3, sample_count=10, mean_free=True, support_density=0.4)
    for x in generate_corpus(spec):
        assert x.freqs.size == 0 or np.abs(x.freqs).max() <= 3
        assert x.mean() == 0


def test_avoid_axis():
    spec = CorpusSpec(sample_count=10, avoid_axis=1)
    for x in generate_corpus(spec):
        assert np.all(x.freqs[:, 1] != 0)


def test_unit_circle_law():
    spec = CorpusSpec(coefficient_law="unit-circle", sample_count=5)
    for x in generate_corpus(spec):
        assert np.allclose(np.abs(x.vals), 1.0)


def test_random_skew_theta():
    spec = CorpusSpec(d=3, theta_law="random-skew", sample_count=3)
    thetas = [x.theta for x in generate_corpus(spec)]
    assert thetas[0] != thetas[1]
    for th in thetas:
        assert np.allclose(th.entries, -th.entries.T)


def test_spec_roundtrip_and_validation():
    spec = CorpusSpec(theta=((0.0, -0.3), (0.3, 0.0)))
    assert CorpusSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec
    with pytest.raises(ValueError):
        CorpusSpec(coefficient_law="cauchy")
    with pytest.raises(ValueError):
        CorpusSpec(support_density=0)


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        run_suite("nope", CorpusSpec())


def test_witness_replays():
    rep = run_suite("poincare", CorpusSpec(sample_count=5, mean_free=True), {"levels": [3]})
    assert rep.passed
    w = rep.witnesses["max"]
    x = element_from_dict(w["element"])
    assert w["sample_id"] in ("U_1", "U_2")
    assert w["ratio"] == pytest.approx(1 / (2 * math.pi), rel=1e-10)
    assert x.freqs.shape == (1, 2)


def test_report_verdict_rules():
    rep = InequalityReport("demo", {}, bound={"max_spread": 10.0})
    rep.add(0, "g", 1.0, 1.0, True)
    rep.add(1, "g", 20.0, 1.0, True)
    assert rep.verdict == "fail"
    rep.bound["spread_groups"] = ["other"]
    assert rep.verdict == "pass"
    rep.add(2, "h", 1.0, 0.0, False)
    assert rep.verdict == "fail"
    summary = json.loads(rep.summary_json())
    assert summary["failed_rows"] == 1 and summary["rows"] == 3


def test_besov_equiv_k():
    assert besov_equiv_k("poisson-eps", 0.5) == 1
    assert besov_equiv_k("diff", 1.0) == 2
    assert besov_equiv_k("heat-eps", 1.0) == 1
    assert besov_equiv_k("circular-heat", -1.0) == 0
    assert besov_equiv_k("poisson-eps", -1.0, "minimal") == 0
    assert besov_equiv_k("poisson-eps", -1.0) == 3
    assert besov_equiv_k("heat-eps", -1.0) == 3
    with pytest.raises(ValueError):
        besov_equiv_k("diff", 1.0, "largest")


def test_peak_constant_matches_single_frequency():
    # sup over eps of eps^{k-a} (2 pi r)^k e^{-2 pi eps r}, for r large enough that the peak lies in (0, 1]
    r, a, k = 5.0, -1.0, 2
    eps = np.linspace(1e-4, 1.0, 200001)
    direct = np.max(eps ** (k - a) * (2 * np.pi * r) ** k * np.exp(-2 * np.pi * eps * r))
    assert direct / r ** a == pytest.approx(peak_constant("poisson-eps", a, k), rel=1e-6)


def test_scalar_lp_norm():
    th = ThetaMatrix.zero(1)
    x = monomial(th, [3], 2.0)
    for p in (1, 2, 4, math.inf):
        assert scalar_lp_norm(x, p) == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_runs(name):
    params = {"levels": [3]}
    if name in ("besov_equiv", "triebel_equiv"):
        params.update(nodes=12, eps_min=1e-3)
    if name in ("bbm", "ms_limit", "kfunc", "marchaud", "lipschitz"):
        params.update(directions=16)
    if name == "commutative_oracle":
        params = {}
    rep = run_suite(name, CorpusSpec(sample_count=2, seed=11), params)
    assert rep.rows
    assert rep.passed, rep.summary_json()
