import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardy_orlicz import orlicz
from hardy_orlicz.errors import DomainError
from hardy_orlicz.orlicz import (
    CONDITIONS, catalog, catalog_names, chi_eval, chi_tail_integral, classify_growth,
    complementary_eval, complementary_inverse, inverse, kappa_convexity_check,
)

CATALOG = ["power:2", "power:3", "exp", "psi2", "loglog", "logpow:1.5", "spliced-logsq"]


def test_catalog_names_cover_interface():
    names = catalog_names()
    for key in ("power:p", "exp", "psi2", "loglog", "logpow:alpha", "spliced-logsq"):
        assert key in names


def test_eval_examples():
    assert catalog("exp").eval(0.0) == 0.0
    assert catalog("psi2").eval(1.0) == pytest.approx(math.e - 1, rel=1e-14)
    assert catalog("spliced-logsq").eval(1.0) == pytest.approx(math.exp(-0.25), rel=1e-14)


def test_eval_rejects_bad_input():
    psi = catalog("psi2")
    for bad in (-1.0, math.inf, math.nan):
        with pytest.raises(DomainError):
            psi.eval(bad)


def test_overflow_keeps_log_eval():
    psi = catalog("psi2")
    with np.errstate(over="ignore"):
        assert psi.eval(40.0) == math.inf
    assert psi.log_eval(40.0) == pytest.approx(1600.0, rel=1e-14)


def test_inverse_examples():
    assert inverse(catalog("exp"), 15.0) == pytest.approx(math.log(16), rel=1e-12)
    assert inverse(catalog("psi2"), 1.0) == pytest.approx(math.sqrt(math.log(2)), rel=1e-12)
    assert inverse(catalog("power:2"), 4.0) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(DomainError):
        inverse(catalog("psi2"), math.inf)


@pytest.mark.parametrize("name", CATALOG)
def test_inverse_roundtrip(name):
    psi = catalog(name)
    x = np.geomspace(psi.x0, 1e4, 200)
    back = psi.inverse_log1p(np.logaddexp(psi.log_psi(x), 0.0))
    assert np.max(np.abs(back / x - 1)) <= 1e-10


def test_complementary_examples():
    assert complementary_eval(catalog("power:2"), 2.0) == pytest.approx(1.0, rel=1e-10)
    assert complementary_eval(catalog("psi2"), 0.0) == 0.0


def test_complementary_matches_dense_grid():
    psi = catalog("psi2")
    t = np.linspace(0, 3, 300001)
    oracle = np.max(3.0 * t - psi.eval(t))
    assert complementary_eval(psi, 3.0) == pytest.approx(oracle, rel=1e-8)


@pytest.mark.parametrize("name", ["power:2", "exp", "psi2", "spliced-logsq"])
def test_young_inequality(name):
    psi = catalog(name)
    xs = np.linspace(0.05, 4, 25)
    ys = np.linspace(0.05, 6, 25)
    phi = np.array([complementary_eval(psi, y) for y in ys])
    lhs = xs[:, None] * ys[None, :]
    rhs = psi.eval(xs)[:, None] + phi[None, :]
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


def test_inverse_product_inequality():
    psi = catalog("psi2")
    for v in np.geomspace(0.1, 1e4, 30):
        assert psi.inverse(v) * complementary_inverse(psi, v) >= v * (1 - 1e-9)


def test_chi_examples():
    assert chi_eval(catalog("exp"), 2.0, 3.0) == pytest.approx(15.0, rel=1e-10)
    for name in CATALOG:
        assert chi_eval(catalog(name), 1.0, 7.0) == pytest.approx(7.0, rel=1e-10)
    assert chi_eval(catalog("psi2"), 2.0, 1.0) == pytest.approx(15.0, rel=1e-10)


@given(st.floats(0.1, 50.0), st.floats(1.0, 3.0), st.floats(1.0, 3.0), st.sampled_from(CATALOG))
def test_chi_monotone(x, k1, k2, name):
    psi = catalog(name)
    lo, hi = sorted((k1, k2))
    with np.errstate(over="ignore"):
        assert chi_eval(psi, lo, x) <= chi_eval(psi, hi, x) * (1 + 1e-12)
        assert chi_eval(psi, lo, x) <= chi_eval(psi, lo, 1.5 * x) * (1 + 1e-12)


def test_classify_examples():
    ev = classify_growth(catalog("psi2"), "delta2", witness=math.sqrt(2))
    assert ev.verdict == "holds-on-grid"
    ev = classify_growth(catalog("power:2"), "delta0", witness=2.0)
    assert ev.verdict == "fails-on-grid"
    assert np.allclose(ev.ratios, math.log(4.0), atol=1e-10)
    assert classify_growth(catalog("logpow:1.5"), "delta1").verdict == "fails-on-grid"


def test_classify_record_and_errors():
    ev = classify_growth(catalog("exp"), "delta1")
    rec = ev.to_dict()
    assert set(rec) == {"condition", "witness", "verdict", "grid_min", "grid_max"}
    assert rec["grid_max"] / rec["grid_min"] >= 1e6 * (1 - 1e-12)
    with pytest.raises(DomainError):
        classify_growth(catalog("exp"), "delta1", grid=[1.0, 2.0])
    with pytest.raises(DomainError):
        classify_growth(catalog("exp"), "delta7")


@pytest.mark.parametrize("cond", CONDITIONS)
def test_classify_is_deterministic(cond):
    psi = catalog("spliced-logsq")
    a, b = classify_growth(psi, cond), classify_growth(psi, cond)
    assert a.to_dict() == b.to_dict()
    assert np.array_equal(a.ratios, b.ratios)


def test_chi_tail_examples():
    tail = chi_tail_integral(catalog("exp"), 2.0, 1e6)
    oracle = 0.5 * math.log((math.e + 1) / (math.e - 1))
    assert tail.value == pytest.approx(oracle, abs=2e-6)
    assert not tail.diverging
    tail = chi_tail_integral(catalog("power:2"), 2.0, 1e6)
    assert tail.diverging
    assert tail.value == pytest.approx(0.25 * math.log(1e6), rel=1e-6)
    assert not chi_tail_integral(catalog("logpow:1.5"), 2.0, 1e8).diverging


def test_kappa_examples():
    assert kappa_convexity_check(catalog("psi2")).convex
    assert kappa_convexity_check(catalog("power:3")).convex
    assert not kappa_convexity_check(orlicz.x2logx_spliced()).convex


def test_spliced_knot_is_continuous():
    psi = catalog("spliced-logsq")
    k = math.sqrt(math.e)
    assert psi.eval(k * (1 - 1e-12)) == pytest.approx(psi.eval(k * (1 + 1e-12)), rel=1e-9)


@pytest.mark.parametrize("name", CATALOG)
def test_axioms(name):
    report = catalog(name).check_axioms()
    assert all(bool(v) for k, v in report.items() if isinstance(v, (bool, np.bool_)))


def test_piecewise_linear_inverse():
    psi = orlicz.piecewise_linear([1.0, 2.0], [1.0, 2.0, 4.0])
    x = np.linspace(0.1, 5, 40)
    assert np.allclose(psi.inverse(psi.eval(x)), x, rtol=1e-12)
