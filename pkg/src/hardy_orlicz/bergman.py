"""Bergman-Orlicz numerics on the disk with normalized area measure ``dA = dx dy / pi``.

Area integrals use tensor-product rules: composite Gauss-Legendre in the
radius (weight ``2 r dr``) times either the uniform rule or graded
Gauss-Legendre panels in the angle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .carleson import vanishing_evidence
from .errors import DomainError, NumericError
from .measures import luxemburg_norm
from .orlicz import OrliczFunction
from .symbols import Symbol, construct

__all__ = [
    "AreaQuadrature",
    "kernel_H",
    "bergman_norm",
    "BergmanRatioTable",
    "bergman_compact_ratio",
    "parseval_finite_group",
    "BlaschkeBound",
    "blaschke_S_bound",
    "bergman_evaluation_bounds",
    "EVALUATION_UPPER_CONSTANT",
]

# ||delta_a|| <= 2 ||H_a||_Phi <= 2 Psi^{-1}(4/(1-|a|)^2) <= 8 Psi^{-1}(1/(1-|a|)^2).
EVALUATION_UPPER_CONSTANT = 8.0


def _panels(edges: np.ndarray, n: int):
    """Composite Gauss-Legendre nodes and weights on consecutive intervals."""
    x, w = np.polynomial.legendre.leggauss(n)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    return (a + half * (x + 1)).ravel(), (half * w).ravel()


def _geometric_edges(width: float, ratio: float = 2.0) -> np.ndarray:
    """Edges in ``[0, 1]`` of panels shrinking geometrically toward 1 down to ``width``."""
    k = max(0, int(math.ceil(math.log(1.0 / width, ratio))))
    gaps = ratio ** -np.arange(k + 1, dtype=float)
    return np.concatenate([1 - gaps, [1.0]])


@dataclass(frozen=True)
class AreaQuadrature:
    """Tensor rule for ``dA`` normalized to total mass 1.

    Parameters
    ----------
    n_radial : int
        Gauss-Legendre nodes in ``r`` (per panel when ``cluster`` is set).
    n_angular : int
        Uniform angles (or nodes per panel when ``focus`` is set).
    cluster : float, optional
        Smallest radial panel width; panels halve toward ``|z| = 1``.
    focus : float, optional
        Angle around which angular panels halve down to width ``cluster``.
    """

    n_radial: int = 256
    n_angular: int = 512
    cluster: float | None = None
    focus: float | None = None

    def __post_init__(self):
        if self.n_radial < 1 or self.n_angular < 1:
            raise DomainError("node counts must be positive")
        if self.cluster is not None and not 0 < self.cluster < 1:
            raise DomainError("cluster width must lie in (0, 1)")
        if self.focus is not None and self.cluster is None:
            raise DomainError("an angular focus needs a cluster width")

    @classmethod
    def around(cls, a: complex, n_radial: int = 16, n_angular: int = 16) -> "AreaQuadrature":
        """Rule refined near the boundary point ``a/|a|`` at scale ``1 - |a|``."""
        a = complex(a)
        width = max((1 - abs(a)) / 8, 1e-12)
        return cls(n_radial, n_angular, width, math.atan2(a.imag, a.real))

    @cached_property
    def _rule(self):
        if self.cluster is None:
            r, wr = _panels(np.array([0.0, 1.0]), self.n_radial)
        else:
            r, wr = _panels(_geometric_edges(self.cluster), self.n_radial)
        wr = wr * 2 * r
        if self.focus is None:
            t = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
            wt = np.full(self.n_angular, 1.0 / self.n_angular)
        else:
            right = np.pi * (1 - _geometric_edges(self.cluster / np.pi)[::-1])
            edges = np.concatenate([-right[::-1], right[1:]])
            t, wt = _panels(edges, self.n_angular)
            t, wt = t + self.focus, wt / (2 * np.pi)
        return r, wr, t, wt

    @property
    def shape(self) -> tuple[int, int]:
        r, _, t, _ = self._rule
        return r.size, t.size

    @cached_property
    def points(self) -> np.ndarray:
        r, _, t, _ = self._rule
        return (r[:, None] * np.exp(1j * t)[None, :]).ravel()

    @cached_property
    def weights(self) -> np.ndarray:
        _, wr, _, wt = self._rule
        return (wr[:, None] * wt[None, :]).ravel()

    def integrate(self, values) -> float:
        values = np.asarray(values)
        if values.shape != self.weights.shape:
            raise DomainError("values must match the quadrature nodes")
        return float(np.sum(values * self.weights))


def kernel_H(a, w):
    """``H_a(w) = (1 - |a|^2)^2 / |1 - conj(a) w|^4``."""
    a = np.asarray(a, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(a) >= 1) or np.any(np.abs(w) >= 1):
        raise DomainError("kernel_H needs points of the open disk")
    return (1 - np.abs(a) ** 2) ** 2 / np.abs(1 - np.conj(a) * w) ** 4


def bergman_norm(f, psi: OrliczFunction, quad: AreaQuadrature | None = None,
                 rtol: float = 1e-10) -> float:
    """Luxemburg norm of ``f`` in ``L^Psi(D, dA)``.

    ``f`` is a callable evaluated on the nodes or an array of node values.
    """
    quad = AreaQuadrature() if quad is None else quad
    vals = f(quad.points) if callable(f) else np.asarray(f)
    vals = np.broadcast_to(vals, quad.weights.shape)
    if not np.all(np.isfinite(vals)):
        raise DomainError("function is not finite on the quadrature nodes")
    return luxemburg_norm(vals, quad.weights, psi, rtol=rtol)


# ---------------------------------------------------------------------------
# Compactness ratio
# ---------------------------------------------------------------------------

def _psi_inv_recip_sq(psi: OrliczFunction, gap):
    """``Psi^{-1}(1 / gap^2)`` without forming huge intermediates."""
    gap = np.asarray(gap, dtype=float)
    # log(1 + 1/g^2) = log1p(g^2) - 2 log g
    return psi.inverse_log1p(np.log1p(gap * gap) - 2 * np.log(gap))


@dataclass(frozen=True)
class BergmanRatioTable:
    """``Psi^{-1}(1/(1-|phi(a)|)^2) / Psi^{-1}(1/(1-|a|)^2)`` along rays.

    ``ratio[i, j]`` is taken at ``|a| = radii[i]`` on the ray ``angles[j]``;
    ``nan`` marks nodes where ``|phi(a)|`` rounds to 1.
    """

    radii: np.ndarray
    angles: np.ndarray
    ratio: np.ndarray
    excluded: int
    eps_inf: dict = field(default_factory=dict)

    @property
    def ray_max(self) -> np.ndarray:
        """Largest ratio over rays at each radius."""
        return np.nanmax(self.ratio, axis=1)

    def monotone(self, jitter: float = 0.05) -> np.ndarray:
        """Per ray: the ratio never exceeds its running minimum by more than ``jitter``."""
        r = self.ratio
        floor = np.fmin.accumulate(r, axis=0)
        return np.all(r[1:] <= floor[:-1] * (1 + jitter), axis=0)

    def vanishing(self) -> dict:
        return vanishing_evidence(1 - self.radii, self.ray_max)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("|a|", "ray_angle", "ratio"))
            for i, rad in enumerate(self.radii):
                for j, ang in enumerate(self.angles):
                    writer.writerow((repr(float(rad)), repr(float(ang)),
                                     repr(float(self.ratio[i, j]))))


def bergman_compact_ratio(phi: Symbol, psi: OrliczFunction, radius_grid=None,
                          n_rays: int = 64, eps_set=(0.5, 0.25, 0.125)) -> BergmanRatioTable:
    """Tabulate the compactness ratio on ``n_rays`` equispaced rays.

    Also reports, per ``eps``, the infimum over the grid of
    ``(1 - |phi(z)|) / (1 - |z|)^eps``, the equivalent form for ``Psi_2``.
    """
    radii = (1 - 2.0 ** -np.arange(1, 6.01, 0.25)) if radius_grid is None \
        else np.asarray(radius_grid, dtype=float)
    if radii.size == 0 or np.any((radii < 0) | (radii >= 1)):
        raise DomainError("radius grid must lie in [0, 1)")
    if np.any(np.diff(radii) <= 0):
        raise DomainError("radius grid must be increasing")
    if n_rays < 1:
        raise DomainError("need at least one ray")
    angles = 2 * np.pi * np.arange(n_rays) / n_rays
    z = radii[:, None] * np.exp(1j * angles)[None, :]
    gap_phi = 1 - np.abs(phi.eval(z))
    bad = gap_phi <= 0
    gap_z = 1 - radii[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        num = _psi_inv_recip_sq(psi, np.where(bad, 1.0, gap_phi))
        ratio = np.where(bad, np.nan, num / _psi_inv_recip_sq(psi, gap_z))
    eps_inf = {}
    for eps in eps_set:
        q = np.where(bad, np.nan, gap_phi / gap_z ** eps)
        eps_inf[float(eps)] = float(np.nanmin(q)) if np.any(~bad) else math.nan
    return BergmanRatioTable(radii, angles, ratio, int(np.sum(bad)), eps_inf)


# ---------------------------------------------------------------------------
# Parseval identity on roots of unity
# ---------------------------------------------------------------------------

def parseval_finite_group(a: complex, p: int, rtol: float = 1e-12):
    """Average of ``1/|1 - a w^k|^2`` over ``p``-th roots of unity.

    Returns ``(lhs, rhs, lower)`` with ``rhs = (1 - |a|^{2p}) / ((1 - |a|^2) |1 - a^p|^2)``
    and ``lower = (p/4) |a|^p``.  Raises :class:`NumericError` if the identity
    fails to ``rtol`` or the lower bound fails.
    """
    a = complex(a)
    p = int(p)
    if p < 1:
        raise DomainError("p must be a positive integer")
    if abs(a) >= 1:
        raise DomainError("a must lie in the open disk")
    k = np.arange(p)
    w = np.exp(2j * np.pi * k / p)
    lhs = math.fsum(1.0 / np.abs(1 - a * w) ** 2) / p
    x = abs(a) ** 2
    geom = math.fsum(x ** j for j in range(p))  # (1 - x^p) / (1 - x)
    rhs = geom / abs(1 - a ** p) ** 2
    lower = 0.25 * p * abs(a) ** p
    if not abs(lhs - rhs) <= rtol * rhs:
        raise NumericError(f"parseval identity off by {abs(lhs - rhs) / rhs:.3e}")
    if not lhs >= lower:
        raise NumericError("parseval lower bound fails")
    return lhs, rhs, lower


# ---------------------------------------------------------------------------
# Blaschke product bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlaschkeBound:
    """``|B_N(z)|^2 <= exp(-S_N(z))`` and the single-level minorant of ``S_N``."""

    z: complex
    modulus_sq: float
    S: float
    exp_bound: float
    level: int
    level_minorant: float

    @property
    def holds(self) -> bool:
        return self.modulus_sq <= self.exp_bound and self.S >= self.level_minorant


def blaschke_S_bound(B, z: complex) -> BlaschkeBound:
    """Check the Blaschke estimates at ``z`` for ``B = paper_blaschke(N)``.

    ``B`` is a symbol built by ``paper_blaschke`` or the number of levels.
    The level ``n`` with ``r_n < |z| <= r_{n+1}`` gives the minorant
    ``(1 - |z|)/4 * p_n^2 (1 - r_n) (r_n |z|)^{p_n}``; for ``|z| <= 1/2`` the
    level is 0 and the minorant is 0.
    """
    if not isinstance(B, Symbol):
        B = construct("paper_blaschke", N=int(B))
    if B.kind != "paper_blaschke":
        raise DomainError("blaschke_S_bound needs a paper_blaschke symbol")
    levels = B.meta["levels"]
    zeros = B.meta["zeros"]
    z = complex(z)
    r = abs(z)
    if r >= 1:
        raise DomainError("z must lie in the open disk")
    if r > levels[-1]["r"]:
        raise DomainError(f"|z| = {r} exceeds the last built level r_N = {levels[-1]['r']}")
    u = (1 - r * r) * (1 - np.abs(zeros) ** 2) / np.abs(1 - np.conj(zeros) * z) ** 2
    S = math.fsum(u)
    # Product of 1 - u_n: each factor is |z_n - z|^2 / |1 - conj(z_n) z|^2.
    modulus_sq = float(np.exp(np.sum(np.log1p(-u))))
    level, minorant = 0, 0.0
    for lv in levels:
        if lv["r"] < r:
            level = lv["n"]
    if level >= 1:
        lv = levels[level - 1]
        rn, pn = lv["r"], lv["p"]
        minorant = (1 - r) / 4 * pn * pn * (1 - rn) * (rn * r) ** pn
    return BlaschkeBound(z, modulus_sq, S, math.exp(-S), level, minorant)


# ---------------------------------------------------------------------------
# Evaluation functional
# ---------------------------------------------------------------------------

def bergman_evaluation_bounds(a: complex, psi: OrliczFunction, quad: AreaQuadrature | None = None,
                              check_witness: bool = True) -> dict:
    """Bounds ``(1/16) P <= ||delta_a|| <= 8 P`` with ``P = Psi^{-1}(1/(1-|a|)^2)``.

    With ``check_witness`` the ratio ``|G_a(a)| / ||G_a||_Psi`` for
    ``G_a(z) = (1 - |a|^2)^2 / (1 - conj(a) z)^4`` is computed by quadrature
    and must lie between the bounds.
    """
    a = complex(a)
    if abs(a) >= 1:
        raise DomainError("a must lie in the open disk")
    P = float(_psi_inv_recip_sq(psi, 1 - abs(a)))
    out = {"lower": P / 16, "upper": EVALUATION_UPPER_CONSTANT * P, "constant": EVALUATION_UPPER_CONSTANT}
    if check_witness:
        q = AreaQuadrature.around(a) if quad is None else quad
        vals = (1 - abs(a) ** 2) ** 2 / np.abs(1 - np.conj(a) * q.points) ** 4
        norm = luxemburg_norm(vals, q.weights, psi)
        witness = (1 / (1 - abs(a) ** 2) ** 2) / norm
        out.update(witness=witness, witness_norm=norm,
                   sandwich=bool(out["lower"] <= witness <= out["upper"]))
    return out
