"""Finite measures on the closed disk and Orlicz norms over them.

Three concrete measure types share the attribute ``weights``:

* :class:`BoundarySample` -- values of a function on the uniform circle grid
  ``theta_k = 2 pi k / n`` with the normalized arc measure (weight ``1/n``);
* :class:`EmpiricalMeasure` -- weighted atoms in the closed unit disk;
* :class:`DiscreteMeasure` -- an :class:`EmpiricalMeasure` built analytically.

The norm routines accept any object with a ``weights`` array, or a plain
array of weights, together with a sample ``f`` of the same length.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize

from .errors import CapacityError, ConvergenceError, DomainError
from .orlicz import OrliczFunction, piecewise_linear

__all__ = [
    "BoundarySample",
    "EmpiricalMeasure",
    "DiscreteMeasure",
    "modular",
    "luxemburg_norm",
    "tail_distribution",
    "weak_orlicz_score",
    "counterexample_2",
    "counterexample_3",
    "Counterexample3",
]

# Smallest representable gap below 1 that we accept for atom radii.
_MIN_GAP = 1e-15


# ---------------------------------------------------------------------------
# Measure types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySample:
    """Samples on the uniform circle grid with the normalized arc measure.

    Parameters
    ----------
    values : ndarray
        Complex or real samples at ``theta_k = 2 pi k / n``.
    exact : bool
        True when the values come from a closed-form boundary formula, false
        when they were evaluated on the circle of radius ``1 - delta``.
    delta : float
        Radial offset used for the non-exact path (0 when exact).
    """

    values: np.ndarray
    exact: bool = True
    delta: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values)
        n = v.shape[0] if v.ndim == 1 else 0
        if v.ndim != 1 or n < 2 or n & (n - 1):
            raise DomainError("a boundary sample needs a power-of-two length >= 2")
        if not np.all(np.isfinite(v)):
            raise DomainError("boundary sample values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)

    @property
    def total_mass(self) -> float:
        return 1.0

    def map(self, fn) -> "BoundarySample":
        """Return the sample of ``fn(values)`` on the same grid."""
        return BoundarySample(np.asarray(fn(self.values)), self.exact, self.delta)

    def to_csv(self, path) -> None:
        """Write ``theta, value_re, value_im`` rows."""
        v = self.values.astype(complex)
        _write_rows(path, ("theta", "value_re", "value_im"),
                    np.column_stack([self.theta, v.real, v.imag]))

    @classmethod
    def from_csv(cls, path) -> "BoundarySample":
        data = _read_rows(path, 3)
        return cls(data[:, 1] + 1j * data[:, 2])


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Finite positive measure made of weighted atoms in the closed disk."""

    points: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=complex))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if p.shape != w.shape or p.ndim != 1:
            raise DomainError("points and weights must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(w))):
            raise DomainError("atoms and weights must be finite")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        mod = np.abs(p)
        if np.any(mod > 1.0 + 1e-12):
            raise DomainError("atoms must lie in the closed unit disk")
        # Rounding in closed forms can push unimodular points just past 1.
        over = mod > 1.0
        if np.any(over):
            p = p.copy()
            p[over] /= mod[over]
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def restrict(self, mask) -> "EmpiricalMeasure":
        mask = np.asarray(mask, dtype=bool)
        return EmpiricalMeasure(self.points[mask], self.weights[mask], self.label)

    def mass_on_circle(self, tol: float = 1e-12) -> float:
        """Mass carried by atoms with ``|z| >= 1 - tol``."""
        return float(np.sum(self.weights[np.abs(self.points) >= 1.0 - tol]))

    def to_csv(self, path) -> None:
        """Write ``re, im, weight`` rows."""
        _write_rows(path, ("re", "im", "weight"),
                    np.column_stack([self.points.real, self.points.imag, self.weights]))

    @classmethod
    def from_csv(cls, path, label: str = "") -> "EmpiricalMeasure":
        data = _read_rows(path, 3)
        return cls(data[:, 0] + 1j * data[:, 1], data[:, 2], label)


@dataclass(frozen=True)
class DiscreteMeasure(EmpiricalMeasure):
    """Atomic measure built from an analytic recipe; ``meta`` keeps the recipe."""

    meta: dict = field(default_factory=dict, compare=False)


def _write_rows(path, header, rows) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def _read_rows(path, ncol: int) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows, dtype=float).reshape(-1, ncol)
    return data


# ---------------------------------------------------------------------------
# Modular and norms
# ---------------------------------------------------------------------------

def _weights_of(mu, size: int) -> np.ndarray:
    w = getattr(mu, "weights", mu)
    w = np.asarray(w, dtype=float)
    if w.ndim == 0:
        w = np.full(size, float(w))
    if w.shape != (size,):
        raise DomainError(f"measure has {w.shape[0]} weights but f has {size} samples")
    return w


def _prepare(f, mu):
    a = np.abs(np.asarray(getattr(f, "values", f))).ravel()
    w = _weights_of(mu, a.size)
    return a, w


def modular(f, mu, psi: OrliczFunction, C: float) -> float:
    """Return ``sum_k w_k Psi(|f_k| / C)``.

    Overflow of ``Psi`` at any atom with positive weight gives ``inf``.  The
    sum uses numpy's pairwise summation in a fixed order.
    """
    if not C > 0:
        raise DomainError("modular needs C > 0")
    a, w = _prepare(f, mu)
    keep = (w > 0) & (a > 0)
    if not np.any(keep):
        return 0.0
    if not np.all(np.isfinite(a[keep])):
        return math.inf
    vals = psi.eval(a[keep] / C)
    if not np.all(np.isfinite(vals)):
        return math.inf
    return float(np.sum(w[keep] * vals))


def _log_modular(a, w, psi, log_c):
    """``log`` of the modular at ``C = exp(log_c)``, overflow-safe."""
    x = a * math.exp(-log_c)
    with np.errstate(over="ignore"):
        vals = psi.eval(x)
    if np.all(np.isfinite(vals)):
        total = float(np.sum(w * vals))
        return math.log(total) if total > 0 else -math.inf
    # Some terms overflow; combine log Psi terms with a log-sum-exp.
    lp = psi.log_psi(x) + np.log(w)
    top = float(np.max(lp))
    return top + math.log(float(np.sum(np.exp(lp - top))))


def luxemburg_norm(f, mu, psi: OrliczFunction, rtol: float = 1e-10) -> float:
    """Luxemburg norm of the sample ``f`` under the measure ``mu``.

    Solves ``modular(f, mu, psi, C) = 1`` for ``C`` in log space.  The bracket
    ``[max|f| / Psi^{-1}(1/w_min), max|f| / Psi^{-1}(1/M)]``, where ``w_min`` is
    the smallest positive weight and ``M`` the total mass, always contains the
    root.

    Raises
    ------
    DomainError
        If a sample with positive weight is infinite or NaN.
    ConvergenceError
        If the verified modular at the root differs from 1 by more than 1e-8.
    """
    a, w = _prepare(f, mu)
    keep = (w > 0) & (a > 0)
    if not np.all(np.isfinite(a[w > 0])):
        raise DomainError("norm undefined for a sample with infinite values")
    if not np.any(keep):
        return 0.0
    a, w = a[keep], w[keep]
    amax = float(a.max())
    mass = float(np.sum(w))
    lo = math.log(amax) - math.log(float(psi.inverse_log1p(math.log1p(1.0 / w.min()))))
    hi = math.log(amax) - math.log(float(psi.inverse_log1p(math.log1p(1.0 / mass))))
    if hi < lo:
        lo, hi = hi, lo

    def g(c):
        return _log_modular(a, w, psi, c)

    lo -= 1e-12 * max(1.0, abs(lo))
    hi += 1e-12 * max(1.0, abs(hi))
    glo, ghi = g(lo), g(hi)
    # The bracket is analytic; rounding at the end points is absorbed above.
    if glo < 0 or ghi > 0:
        raise ConvergenceError("Luxemburg bracket does not enclose the root")
    if glo == 0:
        root = lo
    elif ghi == 0:
        root = hi
    else:
        root = optimize.brentq(g, lo, hi, xtol=min(rtol, 1e-12) * 1e-2, rtol=4 * np.finfo(float).eps,
                               maxiter=400)
    C = math.exp(root)
    check = modular(a, w, psi, C)
    if not abs(check - 1.0) <= 1e-8:
        raise ConvergenceError(f"modular at computed norm is {check!r}, not 1")
    return C


def tail_distribution(f, mu, t: float) -> float:
    """Return ``mu(|f| > t)`` summed exactly over the atoms."""
    if not t >= 0:
        raise DomainError("tail level must be nonnegative")
    a, w = _prepare(f, mu)
    return float(np.sum(w[a > t]))


def weak_orlicz_score(f, mu, psi: OrliczFunction, c: float,
                      levels=None, per_decade: int = 64) -> float:
    """Return ``sup_t Psi(c t) mu(|f| > t)`` over a geometric level grid.

    The default grid runs from the smallest to the largest positive value of
    ``|f|`` with ``per_decade`` points per decade; a score at most 1 is
    evidence for membership in weak-L^Psi with constant ``c``.
    """
    if not c > 0:
        raise DomainError("weak_orlicz_score needs c > 0")
    a, w = _prepare(f, mu)
    keep = (w > 0) & (a > 0)
    if not np.any(keep):
        return 0.0
    a, w = a[keep], w[keep]
    if levels is None:
        lo, hi = float(a.min()), float(a.max())
        decades = math.log10(hi) - math.log10(lo)  # stays finite for subnormal lo
        count = max(2, int(math.ceil(per_decade * decades)) + 1) if hi > lo else 2
        levels = np.geomspace(lo, hi, count) if hi > lo else np.array([0.5 * lo, lo])
        # Levels just below each end point see the full tail of that atom.
        levels = levels * (1.0 - 1e-12)
    levels = np.asarray(levels, dtype=float)
    order = np.argsort(a, kind="stable")
    a_sorted = a[order]
    # tail[j] = mass of atoms strictly above a_sorted[j-1]
    tail_from = np.concatenate([np.cumsum(w[order][::-1])[::-1], [0.0]])
    idx = np.searchsorted(a_sorted, levels, side="right")
    tails = tail_from[idx]
    pos = tails > 0
    if not np.any(pos):
        return 0.0
    lp = psi.log_psi(c * levels[pos]) + np.log(tails[pos])
    return float(np.exp(np.max(lp)))


# ---------------------------------------------------------------------------
# Counterexample measures
# ---------------------------------------------------------------------------

def _solve_ratio(psi, target_log, start):
    """Smallest ``a >= start`` with ``log Psi(2a) - log Psi(a) >= target_log``."""

    def gap(x):
        return float(psi.log_psi(2 * x) - psi.log_psi(x)) - target_log

    lo = start
    if gap(lo) >= 0:
        return lo
    hi = 2.0 * lo
    while gap(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise DomainError(f"{psi.label}: Psi(2x)/Psi(x) stays bounded; Psi is in Delta_2")
    return optimize.brentq(gap, lo, hi, xtol=1e-14 * hi, rtol=1e-14)


def counterexample_2(psi: OrliczFunction, N: int) -> DiscreteMeasure:
    """Discrete measure that satisfies the compactness ratio but is not Carleson.

    For an Orlicz function outside ``Delta_2`` choose an increasing sequence
    ``a_n`` with ``Psi(2 a_n) / Psi(a_n) >= n 2^n`` and ``Psi(a_n)/n``
    increasing, and put atoms at ``x_n = 1 - 1/Psi(2 a_n)`` with masses
    ``n / Psi(2 a_n) - (n+1) / Psi(2 a_{n+1})``; the last atom gets
    ``N / Psi(2 a_N)``.  Then ``mu([x_n, 1)) = n / Psi(2 a_n)``, so the measure
    is not Carleson.

    Raises
    ------
    CapacityError
        If ``1 - x_N`` falls below double precision resolution.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    a = []
    prev = float(psi.inverse(1.0))
    for n in range(1, N + 1):
        an = _solve_ratio(psi, math.log(n) + n * math.log(2.0), prev)
        if a:
            an = max(an, a[-1] * (1 + 1e-9))
            # Psi(a_n)/n must increase; grow a_n geometrically until it does.
            prev_val = float(psi.log_psi(a[-1])) - math.log(n - 1)
            while float(psi.log_psi(an)) - math.log(n) <= prev_val:
                an *= 1.01
        a.append(an)
        prev = an
    a = np.asarray(a)
    log_psi_2a = psi.log_psi(2 * a)
    if np.any(log_psi_2a > math.log(1.0 / _MIN_GAP)):
        raise CapacityError("counterexample-2 atoms beyond double precision; lower N")
    gap = np.exp(-log_psi_2a)  # 1 - x_n
    n = np.arange(1, N + 1)
    tail = n * gap
    weights = np.append(tail[:-1] - tail[1:], tail[-1])
    if np.any(weights < 0):
        raise DomainError("counterexample-2 weights negative; sequence not admissible")
    x = 1.0 - gap
    return DiscreteMeasure(x.astype(complex), weights, label=f"counterexample-2({psi.label})",
                           meta={"a": a, "gap": gap, "N": N})


@dataclass(frozen=True)
class Counterexample3:
    """Non-``nabla_0`` Orlicz function with a measure separating ``K`` from ``R``.

    Attributes
    ----------
    psi : OrliczFunction
        Piecewise linear function with knots ``b_n`` and slopes ``s_n``.
    measure : DiscreteMeasure
        Atoms of mass ``1/Psi(2^n y_n)`` at ``r_n = 1 - 1/Psi(y_n)``.
    b, x, y : ndarray
        Knots and the test points ``x_n = b_n``, ``y_n = 2 b_n``.
    """

    psi: OrliczFunction
    measure: DiscreteMeasure
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray
    levels: int
    atom_levels: int

    def k_lower_bounds(self) -> np.ndarray:
        """``(1/h_n) / Psi(2 Psi^{-1}(1/h_n))`` at ``h_n = 1/Psi(x_n)``."""
        h = 1.0 / self.psi.eval(self.x[: self.atom_levels])
        return (1.0 / h) / self.psi.eval(2.0 * self.psi.inverse(1.0 / h))


def counterexample_3(levels: int = 20) -> Counterexample3:
    """Build the piecewise linear Orlicz function and discrete measure.

    Knots: ``b_1 = 1`` and ``b_{n+1} = 2^{n+2} b_n``.  Slopes: ``s_0 = 2`` on
    ``[0, b_1]`` and ``s_n = 2^{n+1} Psi(b_n) / b_n`` on ``[b_n, b_{n+1}]``.
    On each piece ``Psi(2^{n+1} b_n) <= Psi(b_{n+1})``, so
    ``Psi(2 x_n)/Psi(x_n)`` is large while ``Psi(2^n y_n)/Psi(y_n)`` stays
    linear, which breaks ``nabla_0``.  Atoms are kept while ``1 - r_n`` is
    representable.
    """
    if not 2 <= levels <= 20:
        raise DomainError("levels must be in [2, 20]")
    b = [1.0]
    slopes = [2.0]
    value = 2.0  # Psi(b_1)
    for n in range(1, levels):
        s = 2.0 ** (n + 1) * value / b[-1]
        nxt = 2.0 ** (n + 2) * b[-1]
        value += s * (nxt - b[-1])
        slopes.append(s)
        b.append(nxt)
    slopes.append(2.0 ** (levels + 1) * value / b[-1])
    psi = piecewise_linear(b, slopes, label="counterexample-3")
    b = np.asarray(b)
    x, y = b, 2.0 * b
    log_psi_y = psi.log_psi(y)
    usable = int(np.sum(log_psi_y < math.log(1.0 / _MIN_GAP)))
    n = np.arange(1, usable + 1)
    gap = np.exp(-log_psi_y[:usable])
    mass = 1.0 / psi.eval(2.0 ** n * y[:usable])
    meas = DiscreteMeasure((1.0 - gap).astype(complex), mass, label="counterexample-3",
                           meta={"gap": gap})
    return Counterexample3(psi, meas, b, x, y, levels, usable)

