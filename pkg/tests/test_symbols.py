import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardy_orlicz.errors import CapacityError, DomainError
from hardy_orlicz.orlicz import catalog
from hardy_orlicz.symbols import (
    TestFunction, blaschke_levels, blaschke_tail_bound, boundary_trace, construct, from_spec,
    make_psummming_symbol, poisson_arc_mass, poisson_kernel, poisson_sup, power_norms,
)

PSI2 = catalog("psi2")


def _disk_points(gen, n=2000, rmax=0.999):
    r = np.sqrt(gen.random(n)) * rmax
    return r * np.exp(2j * np.pi * gen.random(n))


def test_construct_examples():
    assert construct("lens").eval(0.0) == pytest.approx(0.5)
    assert construct("singular_inner").eval(0.0) == pytest.approx(math.exp(-1), rel=1e-14)
    lv = blaschke_levels(3)[2]
    assert lv["r"] == 0.875
    assert lv["p"] == math.floor(2 ** (3 - math.sqrt(3))) + 1 == 3


def test_unknown_kind_and_bad_params():
    with pytest.raises(DomainError):
        construct("mobius")
    with pytest.raises(DomainError):
        construct("constant", c=1.5)
    with pytest.raises(DomainError):
        construct("outer", h=np.r_[np.ones(7), 0.0])
    with pytest.raises(CapacityError):
        construct("paper_blaschke", N=40)


def test_trace_examples():
    phi1 = construct("lens")
    mod, _ = phi1.boundary_formula(np.pi / 2)
    assert mod == pytest.approx(math.sqrt(2) / 2, rel=1e-14)
    mod, arg = construct("phi2").boundary_formula(np.pi)
    assert mod == pytest.approx(0.0, abs=1e-15)
    assert arg == pytest.approx(np.pi / 2, abs=1e-14)
    tr = boundary_trace(construct("identity"), 64)
    assert np.allclose(tr.values, np.exp(1j * tr.theta), atol=1e-15)


def test_trace_paths_and_errors():
    assert boundary_trace(construct("phi2"), 1 << 10).exact
    n = 1 << 10
    h = 0.5 + 0.2 * np.cos(2 * np.pi * np.arange(n) / n)
    tr = boundary_trace(construct("outer", h=h), n)
    assert not tr.exact and tr.delta == 1e-6
    with pytest.raises(DomainError):
        boundary_trace(construct("lens"), 1000)
    with pytest.raises(DomainError):
        boundary_trace(construct("lens"), 1024, delta=0.1)


def test_singular_inner_trace_is_unimodular():
    tr = boundary_trace(construct("singular_inner"), 1 << 16)
    # theta = 0 carries the radial limit 0
    assert tr.values[0] == 0
    assert np.allclose(np.abs(tr.values[1:]), 1.0, atol=1e-12)


@pytest.mark.parametrize("spec", ["lens", "singular_inner", "phi2", "identity", "constant:0.5",
                                  "automorphism:0.4", "paper_blaschke:4", "z_times_B:4"])
def test_self_map(spec, gen):
    z = _disk_points(gen)
    assert np.all(np.abs(from_spec(spec).eval(z)) < 1)


@pytest.mark.parametrize("spec", ["identity", "z_times_B:5"])
def test_schwarz_bound(spec, gen):
    z = _disk_points(gen)
    assert np.all(np.abs(from_spec(spec).eval(z)) <= np.abs(z) * (1 + 1e-12))


def test_spec_roundtrip():
    phi = construct("paper_blaschke", N=3)
    again = from_spec(phi.to_json())
    z = np.array([0.1, 0.5j, -0.3 + 0.2j])
    assert np.allclose(phi.eval(z), again.eval(z), atol=1e-15)


def test_blaschke_tail_report():
    for N in (3, 6, 10):
        levels = blaschke_levels(N)
        assert all(lv["mass"] <= lv["mass_bound"] for lv in levels)
        direct = math.fsum(2 * 2 ** -math.sqrt(n) for n in range(N + 1, 200000))
        assert blaschke_tail_bound(N) == pytest.approx(direct, rel=5e-3)


def test_outer_reconstruction():
    n = 1 << 16
    theta = 2 * np.pi * np.arange(n) / n
    h = 0.6 + 0.3 * np.cos(theta) + 0.05 * np.sin(3 * theta)
    phi = construct("outer", h=h)
    tr = boundary_trace(phi, n, delta=1e-4)
    assert np.max(np.abs(np.abs(tr.values) - h)) <= 1e-3


def test_step_outer_trace():
    edges = np.array([0.0, 1.0, 3.0, 2 * np.pi])
    moduli = np.array([0.9, 0.5, 0.99])
    phi = construct("outer", edges=edges, moduli=moduli)
    tr = boundary_trace(phi, 1 << 12)
    mod = np.abs(tr.values)
    idx = np.searchsorted(edges, tr.theta, side="right") - 1
    assert np.allclose(mod, moduli[idx], rtol=1e-12)


def test_test_function_invariants():
    for a, r in [(1.0, 0.9), (1j, 0.5), (np.exp(0.3j), 0.99)]:
        u = TestFunction(a, r)
        n = 1 << 16
        vals = np.abs(u.boundary(2 * np.pi * np.arange(n) / n))
        assert vals.max() <= 1 + 1e-12
        assert abs(u(a)) == pytest.approx(1.0, rel=1e-12)
        assert np.mean(vals) == pytest.approx(u.l1_norm, rel=1e-8)
    g = TestFunction(1.0, 0.9, normalized=True, psi=PSI2)
    assert g.scale == pytest.approx(PSI2.inverse(10.0), rel=1e-12)
    with pytest.raises(DomainError):
        TestFunction(0.5, 0.1)


def test_power_norm_examples():
    l1, _ = power_norms(construct("identity"), 5, PSI2)
    assert l1 == pytest.approx(1.0, rel=1e-12)
    l1, lpsi = power_norms(construct("constant", c=0.5), 4, PSI2)
    assert l1 == pytest.approx(1 / 16, rel=1e-12)
    assert lpsi == pytest.approx((1 / 16) / math.sqrt(math.log(2)), rel=1e-9)
    n = 1 << 20
    l1, _ = power_norms(construct("phi2"), 8, catalog("power:1"), size=n)
    # the grid is exact for this trig polynomial except for the atom at theta = 0
    assert l1 == pytest.approx(70 / 256 - 1 / n, rel=1e-12)
    assert l1 == pytest.approx(70 / 256, abs=1e-6)


def test_psummming_symbol():
    ps = make_psummming_symbol(PSI2, 3)
    assert ps.levels == 3
    assert np.max(ps.chi_identity_residuals()) <= 1e-8
    assert np.array_equal(ps.symbol.meta["moduli"], ps.r)
    tr = boundary_trace(ps.symbol, 1 << 14)
    mod = np.abs(tr.values)
    assert np.all(np.min(np.abs(mod[:, None] - ps.r[None, :]), axis=1) <= 1e-12)
    assert ps.inverse_gap_integral() == pytest.approx(
        math.fsum(ps.c * ps.beta * np.exp(ps.log_psi_t)), rel=1e-14)


def test_psummming_needs_delta2():
    with pytest.raises(DomainError):
        make_psummming_symbol(catalog("power:2"), 3)


def test_poisson_facts(gen):
    n = 1 << 14
    theta = 2 * np.pi * np.arange(n) / n
    for z in _disk_points(gen, 20, 0.9):
        assert np.mean(poisson_kernel(z, theta)) == pytest.approx(1.0, abs=1e-10)
        r = abs(z)
        assert poisson_kernel(z, np.angle(z)) == pytest.approx(poisson_sup(z), rel=1e-12)
        assert poisson_sup(z) == (1 + r) / (1 - r)


@given(st.floats(-3, 3), st.floats(0.0, 6.0), st.floats(0.0, 0.95), st.floats(-np.pi, np.pi))
def test_poisson_arc_mass_additive(t1, width, rho, beta):
    a = rho * np.exp(1j * beta)
    t2 = t1 + width
    mid = t1 + 0.3 * width
    total = poisson_arc_mass(a, t1, t2)
    assert -1e-12 <= total <= 1 + 1e-12
    assert total == pytest.approx(poisson_arc_mass(a, t1, mid) + poisson_arc_mass(a, mid, t2), abs=1e-12)
