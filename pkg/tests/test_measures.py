import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hardy_orlicz.errors import DomainError
from hardy_orlicz.measures import (
    BoundarySample, DiscreteMeasure, EmpiricalMeasure, counterexample_2, counterexample_3,
    luxemburg_norm, modular, tail_distribution, weak_orlicz_score,
)
from hardy_orlicz.orlicz import catalog
from hardy_orlicz.symbols import TestFunction

PSI2 = catalog("psi2")
N = 1 << 14
HAAR = np.full(N, 1.0 / N)
THETA = 2 * np.pi * np.arange(N) / N


def test_modular_examples():
    assert modular(np.ones(N), HAAR, PSI2, 1.0) == pytest.approx(math.e - 1, rel=1e-13)
    assert modular(np.zeros(N), HAAR, PSI2, 1.0) == 0.0
    u = TestFunction(1.0, 0.9)
    vals = np.abs(u.boundary(THETA))
    assert modular(vals, HAAR, catalog("power:1"), 1.0) == pytest.approx(1 / 19, rel=1e-10)


def test_modular_overflow_is_infinite():
    assert modular(np.array([1.0, 100.0]), np.array([0.5, 0.5]), PSI2, 1.0) == math.inf
    with pytest.raises(DomainError):
        modular(np.ones(4), np.full(4, 0.25), PSI2, 0.0)


def test_norm_examples():
    assert luxemburg_norm(np.ones(N), HAAR, PSI2) == pytest.approx(1 / math.sqrt(math.log(2)), rel=1e-10)
    assert luxemburg_norm(np.zeros(8), np.full(8, 1 / 8), PSI2) == 0.0
    u = TestFunction(1.0, 0.9)
    val = luxemburg_norm(np.abs(u.boundary(THETA)), HAAR, PSI2)
    assert val <= 1 / PSI2.inverse(19.0)


def test_norm_of_u_matches_dense_modular():
    u = TestFunction(1.0, 0.9)
    n = 1 << 18
    vals = np.abs(u.boundary(2 * np.pi * np.arange(n) / n))
    coarse = luxemburg_norm(np.abs(u.boundary(THETA)), HAAR, PSI2)
    assert coarse == pytest.approx(luxemburg_norm(vals, np.full(n, 1 / n), PSI2), rel=1e-8)


def test_norm_of_infinite_sample_is_undefined():
    with pytest.raises(DomainError):
        luxemburg_norm(np.array([1.0, math.inf]), np.array([0.5, 0.5]), PSI2)


@given(st.floats(0.01, 100.0), st.floats(1e-4, 1.0))
def test_one_term_closed_form(t, beta):
    f = np.array([t, 0.0])
    w = np.array([beta, 1 - beta])
    assert luxemburg_norm(f, w, PSI2) == pytest.approx(t / PSI2.inverse(1 / beta), rel=1e-10)


sample = arrays(np.float64, 16, elements=st.floats(0.0, 5.0)).filter(lambda a: a.max() > 1e-3)


@given(sample, st.floats(1e-3, 1e3), st.sampled_from(["psi2", "power:2", "exp", "spliced-logsq"]))
def test_homogeneity(f, lam, name):
    psi = catalog(name)
    w = np.full(16, 1 / 16)
    assert luxemburg_norm(lam * f, w, psi) == pytest.approx(lam * luxemburg_norm(f, w, psi), rel=1e-9)


@given(sample, arrays(np.float64, 16, elements=st.floats(0.0, 2.0)))
def test_monotonicity(f, extra):
    w = np.full(16, 1 / 16)
    assert luxemburg_norm(f, w, PSI2) <= luxemburg_norm(f + extra, w, PSI2) * (1 + 1e-10)


@given(sample, st.floats(0.1, 10.0), st.floats(1.01, 3.0))
def test_modular_decreasing_in_c(f, c, factor):
    w = np.full(16, 1 / 16)
    lo, hi = modular(f, w, PSI2, c * factor), modular(f, w, PSI2, c)
    assert lo < hi or lo == hi == math.inf


@given(sample)
def test_orlicz_inside_weak_orlicz(f):
    w = np.full(16, 1 / 16)
    norm = luxemburg_norm(f, w, PSI2)
    assert weak_orlicz_score(f, w, PSI2, 1 / norm) <= 1 + 1e-9


def test_modular_is_bit_reproducible(gen):
    f = gen.random(1 << 16)
    w = np.full(f.size, 1.0 / f.size)
    assert modular(f, w, PSI2, 0.7) == modular(f.copy(), w.copy(), PSI2, 0.7)


def test_tail_examples():
    assert tail_distribution(np.ones(N), HAAR, 2.0) == 0.0
    n = 1 << 20
    vals = np.cos(_centered(n) / 2)
    oracle = 2 / np.pi * math.acos(0.98)
    assert tail_distribution(vals, np.full(n, 1 / n), 0.98) == pytest.approx(oracle, abs=2 / n)


def _centered(n):
    return np.angle(np.exp(2j * np.pi * np.arange(n) / n))


@given(sample, st.floats(0.01, 10.0))
def test_markov_bound(f, t):
    w = np.full(16, 1 / 16)
    norm = luxemburg_norm(f, w, PSI2)
    with np.errstate(over="ignore"):
        bound = 1 / PSI2.eval(t / norm)
    assert tail_distribution(f, w, t) <= bound * (1 + 1e-9)


def test_weak_score_examples():
    assert weak_orlicz_score(np.ones(N), HAAR, PSI2, PSI2.inverse(1.0)) <= 1 + 1e-12
    # atoms at t_k carrying tail differences, so mu(|f| > t) = 1/Psi(t) on the levels
    psi = catalog("exp")
    levels = np.log1p(np.geomspace(1.0, 1e6, 400))
    tails = 1 / psi.eval(levels)
    w = -np.diff(np.concatenate([tails, [0.0]]))
    score = weak_orlicz_score(levels, w, psi, 1.0, levels=levels * (1 - 1e-12))
    assert score == pytest.approx(1.0, rel=1e-6)
    n = 1 << 18
    mod = np.cos(_centered(n) / 2)
    g = 1 / (1 - mod + 1e-300)
    assert weak_orlicz_score(g, np.full(n, 1 / n), PSI2, 1.0, levels=[2.0, 3.0, 5.0]) > 1


def test_measure_invariants_and_csv(tmp_path):
    with pytest.raises(DomainError):
        EmpiricalMeasure(np.array([1.5]), np.array([1.0]))
    with pytest.raises(DomainError):
        EmpiricalMeasure(np.array([0.5]), np.array([-1.0]))
    mu = EmpiricalMeasure(np.array([0.5j, -0.25]), np.array([0.25, 0.75]))
    mu.to_csv(tmp_path / "m.csv")
    back = EmpiricalMeasure.from_csv(tmp_path / "m.csv")
    assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)
    assert back.total_mass == pytest.approx(1.0, abs=1e-12)
    tr = BoundarySample(np.exp(2j * np.pi * np.arange(8) / 8))
    tr.to_csv(tmp_path / "b.csv")
    assert np.allclose(BoundarySample.from_csv(tmp_path / "b.csv").values, tr.values, atol=1e-15)
    with pytest.raises(DomainError):
        BoundarySample(np.ones(6))


def test_counterexample_2_ratio():
    mu = counterexample_2(PSI2, 10)
    assert isinstance(mu, DiscreteMeasure)
    assert mu.total_mass <= 1 + 1e-12
    assert np.all(np.abs(mu.points) < 1)


def test_counterexample_3_bounds():
    ce = counterexample_3(20)
    gaps, masses = ce.measure.meta["gap"], ce.measure.weights
    ratio = np.array([masses[m:].sum() / gaps[m] for m in range(ce.atom_levels)])
    assert np.all(ratio >= ce.k_lower_bounds() * (1 - 1e-12))
    assert ce.measure.total_mass <= 1 + 1e-12
