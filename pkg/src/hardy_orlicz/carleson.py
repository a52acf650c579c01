"""Carleson windows, pullback measures and composition-operator diagnostics.

Window masses can be computed from an :class:`~hardy_orlicz.measures.EmpiricalMeasure`
or from an exact pullback model. Exact models exist for the identity and
other inner symbols (the pullback is the Poisson measure ``P_{phi(0)} dm``),
for the lens map, for the product of the lens map with the singular inner
function (spiral window masses) and for constants.

The diagnostics decide first-order conditions from finite tables.  A
"vanishing" product is one that is non-increasing over the last decade of the
grid (within 1% jitter) with a positive log-log slope.  A "bounded" product
has a last-decade slope that is not negative.  Both are evidence only.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError
from .measures import BoundarySample, EmpiricalMeasure, luxemburg_norm
from .orlicz import OrliczFunction, classify_growth
from .symbols import Symbol, boundary_trace, poisson_arc_mass, poisson_cdf

__all__ = [
    "Window",
    "pullback",
    "window_measure",
    "window_masses",
    "exact_pullback",
    "ArcPullback",
    "PoissonPullback",
    "LensPullback",
    "SpiralPullback",
    "PointPullback",
    "CarlesonProfile",
    "default_h_grid",
    "default_xi_grid",
    "profile",
    "symbol_profile",
    "loglog_slope",
    "ConditionOutcome",
    "vanishing_evidence",
    "bounded_evidence",
    "psi_carleson_test",
    "window_scaling_check",
    "pushforward_quadrature",
    "condition_W_table",
    "gap_model",
    "order_bounded_check",
    "DiagnosticReport",
    "compactness_diagnostic",
    "ks_distance_to_poisson",
    "CONDITION_LABELS",
]

CONDITION_LABELS = ("R", "K", "R0", "K0", "W", "OB1", "OB2", "OB3", "OB4", "MC")
DEFAULT_A_GRID = (0.5, 1.0, 2.0, 4.0)


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Carleson window ``W(xi, h)`` or sector ``S(xi, h)``.

    ``W = {1 - h < |z| <= 1, |arg(z conj(xi))| < h}`` and ``S = {|xi - z| < h}``.
    """

    xi: complex
    h: float
    shape: str = "W"

    def __post_init__(self):
        if not abs(abs(complex(self.xi)) - 1) <= 1e-12:
            raise DomainError("window centre must be unimodular")
        if not 0 < self.h < 1 and not (self.shape == "S" and 0 < self.h <= 2):
            raise DomainError("window size must lie in (0, 1)")
        if self.shape not in ("W", "S"):
            raise DomainError("window shape must be 'W' or 'S'")

    @classmethod
    def at_angle(cls, alpha: float, h: float, shape: str = "W") -> "Window":
        return cls(complex(np.exp(1j * alpha)), h, shape)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        xi = complex(self.xi)
        if self.shape == "S":
            return np.abs(xi - z) < self.h
        mod = np.abs(z)
        rel = np.angle(z * np.conj(xi))
        return (mod > 1 - self.h) & (np.abs(rel) < self.h)


def pullback(trace: BoundarySample) -> EmpiricalMeasure:
    """Atoms ``(phi*(e^{i theta_k}), 1/n)``."""
    return EmpiricalMeasure(np.asarray(trace.values, dtype=complex), trace.weights, "pullback")


def window_measure(mu, w: Window) -> float:
    """Mass of ``mu`` on the window ``w``."""
    if isinstance(mu, EmpiricalMeasure):
        return float(np.sum(mu.weights[w.contains(mu.points)]))
    if w.shape != "W":
        raise DomainError("exact pullback models answer W windows only")
    return float(mu.window_masses(np.array([np.angle(w.xi)]), w.h)[0])


class _AngularIndex:
    """Sorted arguments of an empirical measure for fast W-window sums."""

    def __init__(self, mu: EmpiricalMeasure):
        self.mod = np.abs(mu.points)
        self.arg = np.angle(mu.points)
        self.w = mu.weights
        self.order = np.argsort(self.arg, kind="stable")

    def window_masses(self, alphas, h):
        alphas = _reduce(np.asarray(alphas, dtype=float))
        keep = self.mod[self.order] > 1 - h
        args = self.arg[self.order][keep]
        w = self.w[self.order][keep]
        if args.size == 0:
            return np.zeros(alphas.shape)
        ext = np.concatenate([args - 2 * np.pi, args, args + 2 * np.pi])
        cum = np.concatenate([[0.0], np.cumsum(np.tile(w, 3))])
        lo = np.searchsorted(ext, alphas - h, side="right")
        hi = np.searchsorted(ext, alphas + h, side="left")
        return cum[hi] - cum[lo]


def _reduce(t):
    t = np.mod(np.asarray(t, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(t == -np.pi, np.pi, t)


def window_masses(mu, alphas, h: float) -> np.ndarray:
    """``mu(W(e^{i alpha}, h))`` for every angle in ``alphas``."""
    if isinstance(mu, EmpiricalMeasure):
        return _AngularIndex(mu).window_masses(alphas, h)
    return mu.window_masses(np.asarray(alphas, dtype=float), h)


# ---------------------------------------------------------------------------
# Exact pullback models
# ---------------------------------------------------------------------------

def _acos_one_minus(h):
    """``arccos(1 - h)`` computed as ``2 arcsin(sqrt(h/2))``."""
    return 2.0 * np.arcsin(np.sqrt(np.asarray(h, dtype=float) / 2.0))


@dataclass(frozen=True)
class ArcPullback:
    """Normalized arc measure on the circle (identity symbol)."""

    total_mass: float = 1.0
    on_circle: float = 1.0

    def window_masses(self, alphas, h):
        return np.full(np.shape(alphas), min(2 * h, 2 * np.pi) / (2 * np.pi))


@dataclass(frozen=True)
class PoissonPullback:
    """``P_a dm`` on the circle: the pullback of every inner symbol with ``phi(0) = a``."""

    a: complex
    total_mass: float = 1.0
    on_circle: float = 1.0

    def window_masses(self, alphas, h):
        alphas = np.asarray(alphas, dtype=float)
        return poisson_arc_mass(self.a, alphas - h, alphas + h)


@dataclass(frozen=True)
class LensPullback:
    """Pullback of ``(1 + z)/2``: boundary point ``cos(t) e^{it}`` with mass ``dt/pi``."""

    total_mass: float = 1.0
    on_circle: float = 0.0

    def window_masses(self, alphas, h):
        alphas = _reduce(alphas)
        A = float(_acos_one_minus(h))
        lo = np.maximum(alphas - h, -A)
        hi = np.minimum(alphas + h, A)
        return np.maximum(hi - lo, 0.0) / np.pi


@dataclass(frozen=True)
class PointPullback:
    """Point mass at ``c``."""

    c: complex
    total_mass: float = 1.0
    on_circle: float = 0.0

    def window_masses(self, alphas, h):
        w = np.array([Window.at_angle(a, h).contains(self.c) for a in np.ravel(alphas)])
        return w.astype(float).reshape(np.shape(alphas))


def _g(s):
    """Unwrapped boundary argument ``arccot(s) - s`` of the spiral symbol."""
    return np.arctan2(1.0, s) - s


def _ginv(y):
    """Solve ``arccot(s) - s = y`` for ``s >= 0``; ``0`` when ``y >= pi/2``.

    Newton's method from the root of ``1/s - s = y``, which is accurate to
    ``O(s^-3)`` for large ``s``.
    """
    y = np.asarray(y, dtype=float)
    top = y >= np.pi / 2
    y = np.where(top, np.pi / 2, y)
    s = 0.5 * (np.sqrt(y * y + 4.0) - y)
    for _ in range(50):
        step = (_g(s) - y) * (1 + s * s) / (2 + s * s)
        s = np.maximum(s + step, 0.0)
        if np.all(np.abs(step) <= 1e-14 * np.maximum(s, 1.0)):
            break
    return np.where(top, 0.0, s)


@dataclass(frozen=True)
class SpiralPullback:
    """Pullback of ``(1 + z)/2 * exp(-(1 + z)/(1 - z))``.

    On ``0 < theta <= pi`` set ``s = cot(theta/2)``.  The boundary point is
    ``(s / sqrt(1 + s^2)) e^{i g(s)}`` with ``g(s) = arccot(s) - s`` and the arc
    measure is ``ds / (pi (1 + s^2))``.  The other half circle is the complex
    conjugate.  Window masses are summed exactly over each turn of the spiral
    up to ``s = max(s_exact, 2 s0)``, where ``s0`` is the modulus cut.
    Beyond it each turn contributes the window's share ``h/pi`` of its mass;
    cutting at a turn boundary makes this a midpoint rule.
    """

    s_exact: float = 256.0
    total_mass: float = 1.0
    on_circle: float = 0.0

    def _side(self, alphas, h):
        s0 = 1.0 / math.tan(float(_acos_one_minus(h)))
        g0 = float(_g(s0))
        S = max(self.s_exact, 2.0 * s0)
        # Turn k spans phases (base - pi, base + pi] with base = alpha + 2 pi k;
        # turns lying entirely in s <= S are summed exactly.
        kc = np.ceil((float(_g(S)) + np.pi - alphas) / (2 * np.pi))
        kmin = int(np.min(kc))
        kmax = math.floor((g0 - np.min(alphas) + h) / (2 * np.pi))
        ks = np.arange(kmin, kmax + 1, dtype=float)
        base = alphas[:, None] + 2 * np.pi * ks[None, :]
        upper = np.minimum(base + h, g0)
        lower = base - h
        ok = (upper > lower) & (ks[None, :] >= kc[:, None])
        s_lo = np.where(ok, _ginv(np.where(ok, upper, 0.0)), 0.0)
        s_hi = np.where(ok, _ginv(np.where(ok, lower, 0.0)), 0.0)
        # arccot(s_lo) - arccot(s_hi) is pi times the mass.
        mass = np.where(ok, np.arctan2(1.0, s_lo) - np.arctan2(1.0, s_hi), 0.0)
        s_cut = _ginv(alphas + 2 * np.pi * kc - np.pi)
        # Remaining turns: midpoint rule, the window takes h/pi of each turn.
        return (np.sum(mass, axis=1) + (h / np.pi) * np.arctan2(1.0, s_cut)) / np.pi

    def window_masses(self, alphas, h):
        alphas = _reduce(np.atleast_1d(np.asarray(alphas, dtype=float)))
        out = self._side(alphas, h) + self._side(-alphas, h)
        return out


def exact_pullback(phi: Symbol):
    """Exact window model for ``mu_phi``, or ``None`` when there is none."""
    if phi.kind == "identity":
        return ArcPullback()
    if phi.inner:
        return PoissonPullback(complex(phi.phi0))
    if phi.kind == "lens":
        return LensPullback()
    if phi.kind == "phi2":
        return SpiralPullback()
    if phi.kind == "constant":
        return PointPullback(complex(phi.phi0))
    return None


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

def default_h_grid(h_max: float = 1e-1, h_min: float = 1e-5, per_decade: int = 9) -> np.ndarray:
    """Decreasing geometric grid with ``per_decade`` steps per decade."""
    count = int(round(per_decade * math.log10(h_max / h_min))) + 1
    return np.geomspace(h_max, h_min, count)


def default_xi_grid(size: int = 1 << 12, contact=()) -> np.ndarray:
    """Equispaced centre angles plus the symbol's contact points."""
    base = 2 * np.pi * np.arange(size) / size
    return np.unique(_reduce(np.concatenate([base, np.asarray(contact, dtype=float)])))


@dataclass(frozen=True)
class CarlesonProfile:
    """``rho(h) = sup_xi mu(W(xi, h))`` and ``K(h) = sup_{t <= h} rho(t)/t`` on grids.

    The supremum over centres is taken on a finite grid and is therefore a
    lower bound of the true supremum.
    """

    h: np.ndarray
    rho: np.ndarray
    K: np.ndarray
    xi_grid_size: int
    method: str
    total_mass: float = 1.0
    circle_mass: float = 0.0

    def slope(self, h_lo: float, h_hi: float) -> float:
        return loglog_slope(self.h, self.rho, h_lo, h_hi)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("h", "rho", "K"))
            for row in zip(self.h, self.rho, self.K):
                writer.writerow([repr(float(v)) for v in row])

    def to_dict(self) -> dict:
        return {"h": self.h.tolist(), "rho": self.rho.tolist(), "K": self.K.tolist(),
                "xi_grid_size": self.xi_grid_size, "method": self.method}


def loglog_slope(x, y, lo: float, hi: float) -> float:
    """Least-squares slope of ``log y`` against ``log x`` for ``lo <= x <= hi``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = (x >= lo * (1 - 1e-12)) & (x <= hi * (1 + 1e-12)) & (y > 0)
    if np.sum(sel) < 2:
        raise DomainError("need at least two positive points for a slope")
    return float(np.polyfit(np.log(x[sel]), np.log(y[sel]), 1)[0])


def profile(mu, h_grid=None, xi_grid=None, contact=(), method: str | None = None) -> CarlesonProfile:
    """Tabulate ``rho`` and ``K`` for a measure or an exact pullback model."""
    h = default_h_grid() if h_grid is None else np.asarray(h_grid, dtype=float)
    if h.size == 0:
        raise DomainError("h grid is empty")
    h = np.sort(h)[::-1]
    xi = default_xi_grid(contact=contact) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    if xi.size == 0:
        raise DomainError("centre grid is empty")
    if isinstance(mu, EmpiricalMeasure):
        index = _AngularIndex(mu)
        masses = index.window_masses
        meth = method or "empirical"
        total, circle = mu.total_mass, mu.mass_on_circle()
    else:
        masses = mu.window_masses
        meth = method or "exact"
        total, circle = mu.total_mass, mu.on_circle
    rho = np.array([float(np.max(masses(xi, hh))) for hh in h])
    ratio = rho / h
    # K(h) = sup over grid points t <= h, i.e. a running max from the small end.
    K = np.maximum.accumulate(ratio[::-1])[::-1]
    return CarlesonProfile(h, rho, K, int(xi.size), meth, total, circle)


def symbol_profile(phi: Symbol, method: str = "auto", size: int = 1 << 22, h_grid=None,
                   xi_size: int = 1 << 12) -> CarlesonProfile:
    """Profile of ``mu_phi``; ``method`` is ``"auto"``, ``"exact"`` or ``"empirical"``."""
    xi = default_xi_grid(xi_size, phi.contact)
    model = exact_pullback(phi) if method in ("auto", "exact") else None
    if model is None:
        if method == "exact":
            raise DomainError(f"no exact pullback model for {phi.kind}")
        model = pullback(boundary_trace(phi, size))
    return profile(model, h_grid, xi)


# ---------------------------------------------------------------------------
# Vanishing and boundedness criteria
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionOutcome:
    """Outcome of one condition; ``holds`` is ``None`` when undecided."""

    label: str
    holds: bool | None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "evidence": _jsonable(self.evidence)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _last_decade(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.argsort(x)
    x, y = x[order], y[order]
    sel = x <= 10.0 * x[0] * (1 + 1e-9)
    return x[sel], y[sel]


def vanishing_evidence(x, y, jitter: float = 0.01, min_slope: float = 0.01) -> dict:
    """Decide whether ``y(x) -> 0`` as ``x -> 0`` from the last decade of ``x``.

    Vanishing means ``y`` does not increase by more than ``jitter`` between
    consecutive points as ``x`` decreases, and the least-squares slope of
    ``log y`` against ``log x`` is at least ``min_slope``.  Identically zero
    tables count as vanishing; non-finite values do not.
    """
    xs, ys = _last_decade(x, y)
    if np.all(ys == 0):
        return {"vanishing": True, "slope": math.inf, "monotone": True}
    if not np.all(np.isfinite(ys)):
        return {"vanishing": False, "slope": -math.inf, "monotone": False}
    pos = ys > 0
    if np.sum(pos) < 2:
        return {"vanishing": True, "slope": math.inf, "monotone": True}
    xs, ys = xs[pos], ys[pos]
    slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    # Walking toward small x, each value may exceed the previous by at most jitter.
    monotone = bool(np.all(ys[:-1] <= ys[1:] * (1 + jitter)))
    return {"vanishing": bool(monotone and slope >= min_slope), "slope": slope,
            "monotone": monotone}


def bounded_evidence(x, y, tol: float = 0.05) -> dict:
    """Decide ``y = O(1)`` as ``x -> 0``: the last-decade slope is at least ``-tol``."""
    xs, ys = _last_decade(x, y)
    if np.all(ys == 0):
        return {"bounded": True, "slope": math.inf}
    if not np.all(np.isfinite(ys)):
        return {"bounded": False, "slope": -math.inf}
    pos = ys > 0
    if np.sum(pos) < 2:
        return {"bounded": True, "slope": math.inf}
    slope = float(np.polyfit(np.log(xs[pos]), np.log(ys[pos]), 1)[0])
    return {"bounded": bool(slope >= -tol), "slope": slope}


def _chi(psi: OrliczFunction, A: float, x):
    """``chi_A(x) = Psi(A Psi^{-1}(x))``, ``inf`` on overflow."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return psi.eval(A * psi.inverse_log1p(np.log1p(x)))


def psi_carleson_test(prof: CarlesonProfile, psi: OrliczFunction,
                      A_grid=DEFAULT_A_GRID) -> dict[str, ConditionOutcome]:
    """Conditions ``R``, ``R0``, ``K`` and ``K0`` from a profile.

    For each ``A`` the products ``Psi(A Psi^{-1}(1/h)) rho(h)`` and
    ``h Psi(A Psi^{-1}(1/h)) K(h)`` are tabulated.  ``R`` (``K``) holds when
    some ``A`` keeps its product at most 1 on the grid; ``R0`` (``K0``) holds
    when every product vanishes.
    """
    A_grid = tuple(float(a) for a in A_grid)
    if not A_grid or min(A_grid) <= 0:
        raise DomainError("A grid must be non-empty and positive")
    h = prof.h
    out = {}
    for label, base, scale in (("R", prof.rho, 1.0), ("K", prof.K, h)):
        table, bounded, vanish = {}, {}, {}
        for A in A_grid:
            with np.errstate(over="ignore", invalid="ignore"):
                prod = _chi(psi, A, 1.0 / h) * base * scale
            prod = np.where(base == 0, 0.0, prod)
            table[A] = prod
            bounded[A] = bool(np.all(prod <= 1.0))
            vanish[A] = vanishing_evidence(h, prod)
        holds_some = [A for A in A_grid if bounded[A]]
        out[label] = ConditionOutcome(label, bool(holds_some), {
            "A_grid": list(A_grid), "witness_A": holds_some[0] if holds_some else None,
            "h": h, "products": {str(A): table[A] for A in A_grid}})
        out[label + "0"] = ConditionOutcome(label + "0", all(v["vanishing"] for v in vanish.values()), {
            "A_grid": list(A_grid),
            "per_A": {str(A): vanish[A] for A in A_grid}})
    return out


def mc_test(prof: CarlesonProfile) -> ConditionOutcome:
    """Classical compactness on ``H^2``: ``rho(h)/h -> 0``."""
    ratio = prof.rho / prof.h
    ev = vanishing_evidence(prof.h, ratio)
    return ConditionOutcome("MC", ev["vanishing"], {"h": prof.h, "ratio": ratio, **ev})


# ---------------------------------------------------------------------------
# Window scaling
# ---------------------------------------------------------------------------

def window_scaling_check(mu: EmpiricalMeasure, xi_grid, h: float,
                         eps_set=(0.5, 0.25, 0.125)) -> float:
    """Max over centres and ``eps`` of ``mu(S(xi, eps h)) / (eps mu(S(xi, h)))``.

    ``0/0`` counts as ``0``.  The result is the empirical constant ``k_1``.
    """
    if not 0 < h <= 2:
        raise DomainError("sector size must lie in (0, 2]")
    pts, w = mu.points, mu.weights
    near = np.abs(pts) > 1 - h
    pts, w = pts[near], w[near]
    arg = np.angle(pts)
    half = math.asin(h) if h < 1 else math.pi
    best = 0.0
    for alpha in np.asarray(xi_grid, dtype=float):
        xi = np.exp(1j * alpha)
        cand = np.abs(_reduce(arg - alpha)) <= half + 1e-12
        p, ww = pts[cand], w[cand]
        dist = np.abs(xi - p)
        den = float(np.sum(ww[dist < h]))
        for eps in eps_set:
            if not 0 < eps < 1:
                raise DomainError("eps must lie in (0, 1)")
            num = float(np.sum(ww[dist < eps * h]))
            if den > 0:
                best = max(best, num / (eps * den))
    return best


# ---------------------------------------------------------------------------
# Condition (W)
# ---------------------------------------------------------------------------

def _graded_offsets(scale: float, dtau: float = 0.1):
    """Cells partitioning ``[-pi, pi]``, clustered at 0 with width ``~ scale``.

    Cell edges are ``scale * sinh(tau)`` on a uniform ``tau`` grid; nodes sit
    at the ``tau`` midpoints.  Returns ``(nodes, edges)``.
    """
    tmax = math.asinh(math.pi / scale)
    n = max(8, int(math.ceil(2 * tmax / dtau)))
    tau = np.linspace(-tmax, tmax, n + 1)
    edges = scale * np.sinh(tau)
    edges[0], edges[-1] = -np.pi, np.pi
    nodes = scale * np.sinh(0.5 * (tau[:-1] + tau[1:]))
    return nodes, edges


def _spiral_mass_cdf(y):
    """``pi`` times the spiral mass above phase ``y``: ``arccot(g^{-1}(y))``."""
    return np.arctan2(1.0, _ginv(y))


def _spiral_side_nodes(alpha, scale, S=2000.0, dtau=0.1, n_outer=256, n_tail=48):
    """Quadrature for the pullback of the half circle ``0 < theta <= pi``."""
    pts, wts = [], []
    # theta in [pi/2, pi]: t = theta/2 in [pi/4, pi/2], modulus <= 1/sqrt 2.
    x, gw = np.polynomial.legendre.leggauss(n_outer)
    t = np.pi * 3 / 8 + x * np.pi / 8
    pts.append(np.cos(t) * np.exp(1j * (t - 1 / np.tan(t))))
    wts.append(gw * (np.pi / 8) / np.pi)
    # Spiral turns for s in [1, S], cut into phase cells around alpha; each
    # cell carries its exact mass.
    nodes, edges = _graded_offsets(scale, dtau)
    g_hi, g_lo = float(_g(1.0)), float(_g(S))
    kmin = math.floor((g_lo - alpha - np.pi) / (2 * np.pi))
    kmax = math.ceil((g_hi - alpha + np.pi) / (2 * np.pi))
    ks = 2 * np.pi * np.arange(kmin, kmax + 1, dtype=float)[:, None] + alpha
    lo = np.clip(ks + edges[None, :-1], g_lo, g_hi).ravel()
    hi = np.clip(ks + edges[None, 1:], g_lo, g_hi).ravel()
    mid = (ks + nodes[None, :]).ravel()
    keep = hi > lo
    lo, hi, mid = lo[keep], hi[keep], np.clip(mid[keep], lo[keep], hi[keep])
    s = _ginv(mid)
    pts.append(s / np.sqrt(1 + s * s) * np.exp(1j * mid))
    wts.append((_spiral_mass_cdf(hi) - _spiral_mass_cdf(lo)) / np.pi)
    # s > S: t = arccot s in (0, T]; turns are so fast that each ring is
    # replaced by its rotation average, sampled around alpha.
    T = math.atan2(1.0, S)
    t_min = 1e-4 * math.sqrt(2 * scale)
    x, gw = np.polynomial.legendre.leggauss(n_tail)
    lt = 0.5 * (math.log(T) + math.log(t_min)) + 0.5 * (math.log(T) - math.log(t_min)) * x
    tt = np.exp(lt)
    ring_w = np.append(gw * 0.5 * (math.log(T) - math.log(t_min)) * tt / np.pi, t_min / np.pi)
    ring_mod = np.append(np.cos(tt), 1.0)
    pts.append((ring_mod[:, None] * np.exp(1j * (alpha + nodes))[None, :]).ravel())
    wts.append((ring_w[:, None] * (np.diff(edges) / (2 * np.pi))[None, :]).ravel())
    return np.concatenate(pts), np.concatenate(wts)


def pushforward_quadrature(phi: Symbol, alpha: float, scale: float,
                           uniform_cap: int = 1 << 20):
    """Weighted atoms representing ``mu_phi``, refined near ``e^{i alpha}``.

    ``scale`` is the width of the features to resolve (``1 - r`` for the
    test function ``u_{a,r}``).  Returns ``(points, weights, exact)`` where
    ``exact`` is false when a uniform boundary sample had to be used and the
    sample spacing exceeds ``scale / 4``.
    """
    if phi.kind == "constant":
        return np.array([complex(phi.phi0)]), np.array([1.0]), True
    nodes, edges = _graded_offsets(scale)
    if phi.inner:
        w = poisson_arc_mass(complex(phi.phi0), alpha + edges[:-1], alpha + edges[1:])
        return np.exp(1j * (alpha + nodes)), w, True
    if phi.kind == "lens":
        # Cells span [alpha - pi, alpha + pi]; clip against each translate
        # of the support (-pi/2, pi/2).
        pts, wts = [], []
        for shift in (-2 * np.pi, 0.0, 2 * np.pi):
            lo = np.clip(alpha + edges[:-1], shift - np.pi / 2, shift + np.pi / 2)
            hi = np.clip(alpha + edges[1:], shift - np.pi / 2, shift + np.pi / 2)
            keep = hi > lo
            t = np.clip(alpha + nodes, lo, hi)[keep] - shift
            pts.append(np.cos(t) * np.exp(1j * t))
            wts.append((hi - lo)[keep] / np.pi)
        return np.concatenate(pts), np.concatenate(wts), True
    if phi.kind == "phi2":
        p1, w1 = _spiral_side_nodes(alpha, scale)
        p2, w2 = _spiral_side_nodes(-alpha, scale)
        return np.concatenate([p1, np.conj(p2)]), np.concatenate([w1, w2]), True
    need = 1 << max(16, int(math.ceil(math.log2(64.0 / scale))))
    n = min(need, uniform_cap)
    tr = boundary_trace(phi, n)
    return np.asarray(tr.values, dtype=complex), tr.weights, n >= need


def condition_W_table(phi: Symbol, psi: OrliczFunction, r_grid=None, a_grid=1 << 6) -> dict:
    """Tabulate ``sup_a ||C_phi u_{a,r}||_Psi * Psi^{-1}(1/(1-r))``.

    ``a_grid`` is either a number of equispaced unimodular points or an array
    of angles.  Returns a dictionary with ``r``, ``sup_norm``, ``product``,
    ``argmax`` (angle of the maximizing ``a``) and ``resolved``.
    """
    r = (1 - 10.0 ** (-np.arange(3, 10) / 3.0)) if r_grid is None else np.asarray(r_grid, float)
    if np.any((r < 0) | (r >= 1)):
        raise DomainError("r grid must lie in [0, 1)")
    if np.isscalar(a_grid) or np.ndim(a_grid) == 0:
        na = int(a_grid)
        angles = 2 * np.pi * np.arange(na) / na
    else:
        angles = np.asarray(a_grid, dtype=float)
    angles = _reduce(angles)
    # Real-coefficient symbols have conjugation-symmetric pullbacks.
    symmetric = phi.kind in ("identity", "lens", "phi2", "singular_inner", "paper_blaschke",
                             "z_times_B") or (phi.kind in ("constant", "automorphism")
                                              and complex(phi.phi0).imag == 0)
    if symmetric:
        angles = np.unique(np.abs(angles))
    sup, arg_best, resolved = [], [], []
    for rr in r:
        scale = 1 - rr
        best, where, ok_all = -1.0, 0.0, True
        for alpha in angles:
            pts, w, ok = pushforward_quadrature(phi, float(alpha), scale)
            ok_all &= ok
            u = (scale / (1 - np.exp(-1j * alpha) * rr * pts)) ** 2
            val = luxemburg_norm(u, w, psi)
            if val > best:
                best, where = val, float(alpha)
        sup.append(best)
        arg_best.append(where)
        resolved.append(ok_all)
    sup = np.asarray(sup)
    factor = psi.inverse_log1p(np.log1p(1.0 / (1 - r)))
    return {"r": r, "sup_norm": sup, "product": sup * factor, "argmax": np.asarray(arg_best),
            "resolved": np.asarray(resolved), "a_grid_size": int(len(angles))}


def w_test(table: dict) -> ConditionOutcome:
    ev = vanishing_evidence(1 - table["r"], table["product"])
    return ConditionOutcome("W", ev["vanishing"], {**table, **ev})


# ---------------------------------------------------------------------------
# Order boundedness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _GapModel:
    """Distribution of ``g = 1 - |phi*|`` under ``m``.

    ``kind`` is ``"unit"`` (inner), ``"atoms"`` (finitely many values),
    ``"cos-half"`` (``g = 1 - |cos(theta/2)|``) or ``"sample"``.
    """

    kind: str
    gaps: np.ndarray | None = None
    masses: np.ndarray | None = None

    @property
    def unit_mass(self) -> float:
        if self.kind == "unit":
            return 1.0
        if self.kind in ("atoms", "sample"):
            return float(np.sum(self.masses[self.gaps <= 0]))
        return 0.0

    def tail(self, lam):
        """``m(1 - |phi*| < lam)``."""
        lam = np.asarray(lam, dtype=float)
        if self.kind == "unit":
            return np.ones_like(lam)
        if self.kind == "cos-half":
            return (2 / np.pi) * _acos_one_minus(lam)
        order = np.argsort(self.gaps, kind="stable")
        g = self.gaps[order]
        cum = np.concatenate([[0.0], np.cumsum(self.masses[order])])
        return cum[np.searchsorted(g, lam, side="left")]

    def samples(self, n: int):
        """Gaps and weights at resolution ``n`` (ignored for atoms)."""
        if self.kind == "cos-half":
            theta = _reduce(2 * np.pi * np.arange(n) / n)
            return 2 * np.sin(theta / 4) ** 2, np.full(n, 1.0 / n)
        if self.kind == "sample":
            step = self.gaps.size // n
            return self.gaps[::step], np.full(n, 1.0 / n)
        return self.gaps, self.masses


def gap_model(phi: Symbol, size: int = 1 << 20) -> _GapModel:
    """Exact or sampled distribution of ``1 - |phi*|``."""
    if phi.inner:
        return _GapModel("unit")
    if phi.kind in ("lens", "phi2"):
        return _GapModel("cos-half")
    if phi.kind == "constant":
        return _GapModel("atoms", np.array([1 - abs(complex(phi.phi0))]), np.array([1.0]))
    if phi.kind == "outer" and "moduli" in phi.meta:
        edges = phi.meta["edges"]
        return _GapModel("atoms", 1 - phi.meta["moduli"], np.diff(edges) / (2 * np.pi))
    tr = boundary_trace(phi, size)
    return _GapModel("sample", 1 - np.abs(tr.values), tr.weights)


def _chi_integral(psi, A, gaps, weights):
    keep = gaps > 1e-300
    g, w = gaps[keep], weights[keep]
    with np.errstate(over="ignore", divide="ignore"):
        vals = _chi(psi, A, 1.0 / g)
    if not np.all(np.isfinite(vals)):
        return math.inf
    return float(np.sum(w * vals))


def order_bounded_check(phi: Symbol, psi: OrliczFunction, A_grid=DEFAULT_A_GRID,
                        lambda_grid=None, size: int = 1 << 20,
                        growth_tol: float = 0.05) -> dict[str, ConditionOutcome]:
    """Conditions ``OB1`` to ``OB4`` for ``C_phi`` on ``H^Psi``.

    ``OB1``/``OB2``: ``int chi_A(1/(1 - |phi*|)) dm`` is finite for some/every
    ``A``.  Finiteness is judged by refinement: the integral on ``n`` and
    ``n/2`` samples must agree within ``growth_tol``.  For finitely many
    modulus values the integral is an exact finite sum.
    ``OB3``/``OB4``: ``m(1 - |phi*| < lam) chi_A(1/lam)`` stays bounded as
    ``lam -> 0`` for some/every ``A``.
    """
    model = gap_model(phi, size)
    A_grid = tuple(float(a) for a in A_grid)
    unit = model.unit_mass
    unit_positive = unit > 10.0 / size
    if lambda_grid is None:
        lo = 1e-8 if model.kind in ("cos-half", "atoms", "unit") else 1e2 / size
        lambda_grid = np.geomspace(1e-1, max(lo, 1e-12), 9 * int(round(math.log10(1e-1 / lo))) + 1)
    lam = np.asarray(lambda_grid, dtype=float)
    integrals, finite = {}, {}
    tails = model.tail(lam)
    tail_products, bounded = {}, {}
    for A in A_grid:
        if unit_positive:
            integrals[str(A)] = {"value": math.inf}
            finite[A] = False
        elif model.kind == "atoms":
            val = _chi_integral(psi, A, *model.samples(size))
            integrals[str(A)] = {"value": val}
            finite[A] = math.isfinite(val)
        else:
            full = _chi_integral(psi, A, *model.samples(size))
            half = _chi_integral(psi, A, *model.samples(size // 2))
            ok = math.isfinite(full) and math.isfinite(half) and full <= half * (1 + growth_tol)
            integrals[str(A)] = {"value": full, "half_resolution": half}
            finite[A] = bool(ok)
        with np.errstate(over="ignore", invalid="ignore"):
            prod = np.where(tails == 0, 0.0, tails * _chi(psi, A, 1.0 / lam))
        tail_products[str(A)] = prod
        bounded[A] = False if unit_positive else bounded_evidence(lam, prod)["bounded"]
    common = {"A_grid": list(A_grid), "unit_circle_mass": unit,
              "unit_circle_positive": bool(unit_positive), "model": model.kind}
    some_f = [A for A in A_grid if finite[A]]
    some_b = [A for A in A_grid if bounded[A]]
    return {
        "OB1": ConditionOutcome("OB1", bool(some_f), {**common, "integrals": integrals,
                                                       "witness_A": some_f[0] if some_f else None}),
        "OB2": ConditionOutcome("OB2", all(finite.values()), {**common, "integrals": integrals}),
        "OB3": ConditionOutcome("OB3", bool(some_b), {**common, "lambda": lam, "tail": tails,
                                                       "products": tail_products,
                                                       "witness_A": some_b[0] if some_b else None}),
        "OB4": ConditionOutcome("OB4", all(bounded.values()), {**common, "lambda": lam,
                                                                "products": tail_products}),
    }


# ---------------------------------------------------------------------------
# Full diagnostic
# ---------------------------------------------------------------------------

# (premise, conclusion, growth condition required or None)
_IMPLICATIONS = (
    ("K0", "R0", None), ("R0", "K0", "nabla0"), ("R0", "MC", None), ("R0", "R", None),
    ("K0", "K", None), ("K", "R", None), ("OB2", "OB1", None), ("OB4", "OB3", None),
    ("OB1", "OB3", None), ("OB2", "OB4", None), ("OB2", "R0", None),
    ("R0", "W", "delta0"),
    ("W", "R0", "delta2"), ("R0", "OB2", "delta2"), ("OB4", "OB2", "delta2"),
    ("OB3", "OB1", "delta1"), ("OB4", "OB2", "delta1"),
)


@dataclass(frozen=True)
class DiagnosticReport:
    """Outcomes of all conditions plus consistency warnings."""

    symbol: dict
    psi: str
    outcomes: dict
    growth: dict
    warnings: tuple
    norm_bound: float
    profile: CarlesonProfile | None = None

    @property
    def verdict(self) -> str:
        parts = []
        for lab in CONDITION_LABELS:
            h = self.outcomes[lab].holds
            parts.append(f"{lab} {'holds' if h else ('fails' if h is False else '?')}")
        tail = f"; {len(self.warnings)} consistency warning(s)" if self.warnings else ""
        return f"{self.symbol['kind']} / {self.psi}: " + ", ".join(parts) + tail

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "psi": self.psi,
            "conditions": {lab: self.outcomes[lab].to_dict() for lab in CONDITION_LABELS},
            "growth": self.growth,
            "warnings": list(self.warnings),
            "norm_bound": self.norm_bound,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True, indent=1)


def check_implications(outcomes: dict, growth: dict) -> list[str]:
    """List every implication of the theory contradicted by the outcomes."""
    msgs = []
    if outcomes["R"].holds is False:
        msgs.append("R must hold for every symbol (composition operators are bounded)")
    for pre, post, cond in _IMPLICATIONS:
        if cond is not None and not growth.get(cond, False):
            continue
        a, b = outcomes[pre].holds, outcomes[post].holds
        if a is True and b is False:
            extra = f" under {cond}" if cond else ""
            msgs.append(f"{pre} holds but {post} fails{extra}: numerical resolution warning")
    return msgs


def compactness_diagnostic(phi: Symbol, psi: OrliczFunction, A_grid=DEFAULT_A_GRID,
                           h_grid=None, r_grid=None, a_grid=1 << 6, size: int = 1 << 20,
                           xi_size: int = 1 << 12) -> DiagnosticReport:
    """Run every diagnostic for ``C_phi`` on ``H^Psi`` and cross-check them."""
    prof = symbol_profile(phi, size=size, h_grid=h_grid, xi_size=xi_size)
    outcomes = dict(psi_carleson_test(prof, psi, A_grid))
    outcomes["MC"] = mc_test(prof)
    outcomes["W"] = w_test(condition_W_table(phi, psi, r_grid, a_grid))
    outcomes.update(order_bounded_check(phi, psi, A_grid, size=size))
    growth = {c: classify_growth(psi, c).holds for c in ("delta0", "delta1", "delta2", "nabla0")}
    warns = tuple(check_implications(outcomes, growth))
    a = abs(complex(phi.phi0))
    return DiagnosticReport(phi.to_spec(), psi.label, outcomes, growth, warns,
                            (1 + a) / (1 - a), prof)


# ---------------------------------------------------------------------------
# Pushforward check
# ---------------------------------------------------------------------------

def ks_distance_to_poisson(trace: BoundarySample, a: complex) -> float:
    """Kolmogorov-Smirnov distance between the trace arguments and ``P_a dm``.

    Both distributions are taken on ``(-pi, pi]``.
    """
    args = np.sort(np.angle(np.asarray(trace.values, dtype=complex)))
    n = args.size
    F = poisson_cdf(a, args) - poisson_cdf(a, -np.pi)
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(n) / n
    return float(max(np.max(np.abs(emp_hi - F)), np.max(np.abs(F - emp_lo))))
