import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardy_orlicz.bergman import (
    EVALUATION_UPPER_CONSTANT, AreaQuadrature, bergman_compact_ratio, bergman_evaluation_bounds,
    bergman_norm, blaschke_S_bound, kernel_H, parseval_finite_group,
)
from hardy_orlicz.errors import DomainError, NumericError
from hardy_orlicz.orlicz import catalog
from hardy_orlicz.symbols import blaschke_levels, construct

PSI2 = catalog("psi2")
LINEAR = catalog("power:1")


def _disk(gen, n, rmax):
    return np.sqrt(gen.random(n)) * rmax * np.exp(2j * np.pi * gen.random(n))


def test_area_quadrature_moments():
    for q in (AreaQuadrature(64, 128), AreaQuadrature(8, 16, cluster=1e-3),
              AreaQuadrature.around(0.99j)):
        assert q.integrate(np.ones(q.weights.size)) == pytest.approx(1.0, abs=1e-12)
        assert q.integrate(np.abs(q.points) ** 2) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(DomainError):
        AreaQuadrature(0, 4)


def test_kernel_examples():
    w = np.array([0.1, -0.5j, 0.9])
    assert np.allclose(kernel_H(0.0, w), 1.0)
    assert kernel_H(0.5, 0.5) == pytest.approx(16 / 9, rel=1e-14)
    # sup over the disk is approached at w -> a/|a|
    assert kernel_H(0.5, 1 - 1e-12) == pytest.approx(9.0, rel=1e-9)
    q = AreaQuadrature(256, 512)
    assert q.integrate(kernel_H(0.7j, q.points)) == pytest.approx(1.0, abs=1e-6)


def test_bergman_norm_examples():
    q = AreaQuadrature(64, 64)
    assert bergman_norm(lambda z: np.ones(z.shape), PSI2, q) == pytest.approx(1 / math.sqrt(math.log(2)), rel=1e-10)
    assert bergman_norm(lambda z: kernel_H(0.0, z), LINEAR, q) == pytest.approx(1.0, rel=1e-12)
    assert bergman_norm(np.abs, LINEAR, q) == pytest.approx(2 / 3, rel=1e-12)


@given(st.floats(1e-3, 1e3), st.floats(0.0, 0.9), st.floats(-np.pi, np.pi))
def test_bergman_norm_homogeneity(lam, rho, beta):
    q = AreaQuadrature(32, 64)
    a = rho * np.exp(1j * beta)
    f = lambda z: kernel_H(a, z)  # noqa: E731
    assert bergman_norm(lambda z: lam * f(z), PSI2, q) == pytest.approx(lam * bergman_norm(f, PSI2, q), rel=1e-9)
    assert bergman_norm(f, PSI2, q) <= bergman_norm(lambda z: f(z) + np.abs(z), PSI2, q) * (1 + 1e-10)


def test_ratio_examples():
    ident = bergman_compact_ratio(construct("identity"), PSI2, n_rays=8)
    assert np.allclose(ident.ratio, 1.0, rtol=1e-10)
    zero = bergman_compact_ratio(construct("constant", c=0.0), PSI2, n_rays=8)
    oracle = PSI2.inverse(1.0) / PSI2.inverse(1 / (1 - zero.radii) ** 2)
    assert np.allclose(zero.ratio, oracle[:, None], rtol=1e-10)
    assert zero.vanishing()["vanishing"]


def test_ratio_excludes_boundary_nodes():
    # (1 + z)/2 rounds to 1 on the ray through 1 at the last double below 1
    table = bergman_compact_ratio(construct("lens"), PSI2, [0.5, 1 - 2.0 ** -53], n_rays=4)
    assert table.excluded == 1
    assert np.isnan(table.ratio[1, 0]) and np.all(np.isfinite(table.ratio[1, 1:]))
    with pytest.raises(DomainError):
        bergman_compact_ratio(construct("identity"), PSI2, [0.9, 0.5])


def test_ratio_csv(tmp_path):
    table = bergman_compact_ratio(construct("z_times_B", N=3), PSI2, n_rays=4)
    table.to_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "|a|,ray_angle,ratio"
    assert len(lines) == 1 + table.ratio.size
    assert set(table.eps_inf) == {0.5, 0.25, 0.125}


def test_parseval_examples():
    assert parseval_finite_group(0.0, 5) == (1.0, 1.0, 0.0)
    lhs, rhs, _ = parseval_finite_group(0.5, 1)
    assert lhs == pytest.approx(4.0, rel=1e-15) and rhs == pytest.approx(4.0, rel=1e-15)
    lhs, rhs, lower = parseval_finite_group(0.5, 2)
    assert lhs == pytest.approx(20 / 9, rel=1e-14) and rhs == pytest.approx(20 / 9, rel=1e-14)
    assert lower == pytest.approx(1 / 8)
    with pytest.raises(DomainError):
        parseval_finite_group(1.0, 3)


@given(st.floats(0.0, 0.999), st.floats(-np.pi, np.pi), st.integers(1, 64))
def test_parseval_identity(rho, beta, p):
    a = rho * np.exp(1j * beta)
    try:
        lhs, rhs, lower = parseval_finite_group(a, p)
    except NumericError as exc:  # pragma: no cover
        pytest.fail(str(exc))
    assert lhs >= lower


def test_blaschke_examples():
    B = construct("paper_blaschke", N=6)
    zeros = B.meta["zeros"]
    at0 = blaschke_S_bound(B, 0.0)
    assert at0.modulus_sq == pytest.approx(np.prod(np.abs(zeros) ** 2), rel=1e-12)
    assert at0.S == pytest.approx(np.sum(1 - np.abs(zeros) ** 2), rel=1e-12)
    assert at0.modulus_sq < at0.exp_bound
    B4 = construct("paper_blaschke", N=4)
    assert len(B4.meta["zeros"]) == sum(lv["p"] for lv in blaschke_levels(4)) <= 40
    on_ray = blaschke_S_bound(B4, 0.9)
    assert on_ray.holds and on_ray.modulus_sq < on_ray.exp_bound
    with pytest.raises(DomainError):
        blaschke_S_bound(B4, 0.95)


def test_blaschke_bounds_random(gen):
    B = construct("paper_blaschke", N=6)
    rN = blaschke_levels(6)[-1]["r"]
    for z in _disk(gen, 2000, rN):
        b = blaschke_S_bound(B, z)
        assert b.holds
        assert b.modulus_sq == pytest.approx(abs(B.eval(z)) ** 2, rel=1e-9, abs=1e-300)


def test_evaluation_examples():
    out = bergman_evaluation_bounds(0.0, PSI2, check_witness=False)
    assert out["lower"] == pytest.approx(math.sqrt(math.log(2)) / 16, rel=1e-12)
    assert out["constant"] == EVALUATION_UPPER_CONSTANT
    out = bergman_evaluation_bounds(0.5, PSI2)
    assert out["sandwich"]


def test_evaluation_sandwich_random(gen):
    for a in _disk(gen, 100, 0.99):
        out = bergman_evaluation_bounds(a, PSI2)
        assert out["sandwich"], a


def test_focused_quadrature_matches_fine_rule():
    a = 0.97 * np.exp(0.4j)
    coarse = bergman_evaluation_bounds(a, PSI2)["witness_norm"]
    fine = bergman_evaluation_bounds(a, PSI2, quad=AreaQuadrature.around(a, 48, 48))["witness_norm"]
    assert coarse == pytest.approx(fine, rel=1e-12)
