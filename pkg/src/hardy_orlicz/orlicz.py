"""Orlicz functions, inverses, complementary functions and growth classes.

An Orlicz function is a convex increasing map ``Psi: [0, inf) -> [0, inf)``
with ``Psi(0) = 0`` and ``Psi(x) / x -> inf``.  Every function here keeps a
second representation ``L(x) = log(1 + Psi(x))`` so that arguments far beyond
the double precision range of ``Psi`` itself can still be handled.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, NumericError

__all__ = [
    "OrliczFunction",
    "ChiFunction",
    "GrowthEvidence",
    "ChiTail",
    "KappaReport",
    "CONDITIONS",
    "catalog",
    "catalog_names",
    "power",
    "exponential",
    "psi2",
    "loglog",
    "logpow",
    "spliced_logsq",
    "linear_splice",
    "x2logx_spliced",
    "piecewise_linear",
    "eval_psi",
    "inverse",
    "complementary_eval",
    "chi_eval",
    "classify_growth",
    "default_grid",
    "chi_tail_integral",
    "kappa_convexity_check",
    "log_expm1",
]

_MAX_ITER = 200
_BISECT_RTOL = 1e-15


def log_expm1(L):
    """Return ``log(exp(L) - 1)`` for ``L >= 0`` without overflow."""
    L = np.asarray(L, dtype=float)
    out = np.empty_like(L)
    big = L > 30.0
    small = ~big
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.expm1(L[small]))
    out[big] = L[big] + np.log1p(-np.exp(-L[big]))
    return out


def _as_float_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be nonnegative")
    return arr


def _unwrap(arr, like):
    """Return a Python float when the input was a scalar."""
    if np.ndim(like) == 0:
        return float(np.asarray(arr).reshape(()))
    return arr


def _call(fn, arr):
    """Apply a vectorized callable to a 1-d view and restore the shape."""
    flat = np.atleast_1d(arr)
    return np.asarray(fn(flat), dtype=float).reshape(np.shape(arr))


@dataclass(frozen=True)
class OrliczFunction:
    """A convex Orlicz function with overflow-safe companions.

    Parameters
    ----------
    label : str
        Catalog name or a short description.
    _eval : callable
        Vectorized ``x -> Psi(x)``; may return ``inf`` on overflow.
    _log1p : callable
        Vectorized ``x -> log(1 + Psi(x))``, finite for every finite ``x``.
    _deriv : callable
        Vectorized left derivative ``Psi'``.
    _inv : callable, optional
        Closed form ``y -> Psi^{-1}(y)``.
    _inv_log1p : callable, optional
        Closed form ``L -> Psi^{-1}(e^L - 1)``.
    _log_psi : callable, optional
        Closed form ``x -> log Psi(x)`` used where cancellation matters.
    x0 : float
        Threshold above which asymptotic conditions are tested.
    """

    label: str
    _eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _log1p: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _deriv: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _inv: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    _inv_log1p: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    _log_psi: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    x0: float = 10.0

    # -- evaluation -----------------------------------------------------
    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Return ``Psi(x)``; ``inf`` signals overflow, see :meth:`log_eval`."""
        arr = _as_float_array(x)
        with np.errstate(over="ignore"):
            out = _call(self._eval, arr)
        return _unwrap(out, x)

    def log_eval(self, x):
        """Return ``log(1 + Psi(x))``, finite for every finite ``x``."""
        arr = _as_float_array(x)
        out = _call(self._log1p, arr)
        return _unwrap(out, x)

    def log_psi(self, x):
        """Return ``log Psi(x)`` (``-inf`` at 0) without overflow."""
        arr = _as_float_array(x)
        if self._log_psi is not None:
            with np.errstate(divide="ignore"):
                out = _call(self._log_psi, arr)
            out = np.where(arr == 0, -np.inf, out)
        else:
            out = _call(lambda a: log_expm1(self._log1p(a)), arr)
        return _unwrap(out, x)

    def deriv(self, x):
        """Return the left derivative ``Psi'(x)``."""
        arr = _as_float_array(x)
        with np.errstate(over="ignore"):
            out = _call(self._deriv, arr)
        return _unwrap(out, x)

    # -- inversion ------------------------------------------------------
    def inverse(self, y):
        """Return ``x`` with ``Psi(x) = y``; see :func:`inverse`."""
        arr = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise DomainError("inverse needs a finite argument")
        if np.any(arr < 0):
            raise DomainError("inverse needs a nonnegative argument")
        if self._inv is not None:
            out = _call(self._inv, arr)
        else:
            out = self._bisect_log1p(np.log1p(arr)).reshape(arr.shape)
        return _unwrap(out, y)

    def inverse_log1p(self, L):
        """Return ``x`` with ``log(1 + Psi(x)) = L``; works for huge ``L``."""
        arr = np.asarray(L, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise DomainError("inverse_log1p needs a finite nonnegative value")
        if self._inv_log1p is not None:
            out = _call(self._inv_log1p, arr)
        else:
            out = self._bisect_log1p(arr).reshape(arr.shape)
        return _unwrap(out, L)

    def _bisect_log1p(self, L):
        """Monotone bisection on ``log(1 + Psi)`` with a doubled bracket."""
        L = np.atleast_1d(np.asarray(L, dtype=float))
        lo = np.zeros_like(L)
        hi = np.ones_like(L)
        for _ in range(_MAX_ITER):
            short = self._log1p(hi) < L
            if not np.any(short):
                break
            lo = np.where(short, hi, lo)
            hi = np.where(short, 2.0 * hi, hi)
        else:
            raise ConvergenceError("inverse bracket did not close")
        for _ in range(_MAX_ITER):
            mid = 0.5 * (lo + hi)
            below = self._log1p(mid) < L
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= _BISECT_RTOL * np.maximum(hi, 1e-300)):
                break
        out = 0.5 * (lo + hi)
        out[L == 0] = 0.0
        return out

    # -- complementary function -----------------------------------------
    def complementary(self, y):
        """Return ``Phi(y) = sup_t (y t - Psi(t))``."""
        return complementary_eval(self, y)

    def chi(self, K: float) -> "ChiFunction":
        """Return the function ``x -> Psi(K Psi^{-1}(x))``."""
        return ChiFunction(self, float(K))

    # -- axioms ---------------------------------------------------------
    def check_axioms(self, grid=None, tol: float = 1e-10) -> dict:
        """Check the defining properties on a grid.

        Returns a dictionary of booleans; entries are ``True`` when the
        property holds on the grid.
        """
        if grid is None:
            grid = np.concatenate([np.linspace(0.0, self.x0, 64)[1:], default_grid(self)])
        x = np.unique(np.asarray(grid, dtype=float))
        lp = self.log_psi(x)
        start = float(self.x0)
        top = 1e6 * start
        ratio_lo = self.log_psi(start) - math.log(start)
        ratio_hi = self.log_psi(top) - math.log(top)
        # Convexity through log space: compare Psi(y) with the chord.
        xa, xb, xc = x[:-2], x[1:-1], x[2:]
        lam = (xc - xb) / (xc - xa)
        with np.errstate(over="ignore"):
            pa, pb, pc = self.eval(xa), self.eval(xb), self.eval(xc)
        finite = np.isfinite(pc)
        chord = lam * pa + (1 - lam) * pc
        convex = bool(np.all(pb[finite] <= chord[finite] * (1 + tol) + tol))
        roundtrip = x[(x >= start) & (x <= 1e4)]
        back = self.inverse_log1p(self.log_eval(roundtrip)) if roundtrip.size else roundtrip
        return {
            "zero_at_origin": self.eval(0.0) == 0.0,
            "increasing": bool(np.all(np.diff(lp) > 0)),
            "superlinear": bool(ratio_hi > ratio_lo),
            "convex": convex,
            "inverse_roundtrip": bool(np.all(np.abs(back - roundtrip) <= tol * roundtrip)),
        }


@dataclass(frozen=True)
class ChiFunction:
    """The family ``chi_K(x) = Psi(K Psi^{-1}(x))``."""

    base: OrliczFunction
    K: float

    def __post_init__(self):
        if not (self.K > 0 and math.isfinite(self.K)):
            raise DomainError("chi needs K > 0")

    def __call__(self, x):
        return self.base.eval(self.K * self.base.inverse(x))

    def log1p(self, x):
        """Return ``log(1 + chi_K(x))``."""
        return self.base.log_eval(self.K * self.base.inverse(x))

    def log_chi_from_log1p(self, L):
        """Return ``log chi_K(x)`` where ``L = log(1 + x)``; safe for huge x."""
        return self.base.log_psi(self.K * self.base.inverse_log1p(L))


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def power(p: float, x0: float = 10.0) -> OrliczFunction:
    """``Psi(x) = x^p`` with ``p >= 1``.

    ``p = 1`` is not superlinear; it is accepted because the norms it induces
    (plain L^1) are used as oracles.
    """
    p = float(p)
    if not p >= 1:
        raise DomainError("power needs p >= 1")

    def _inv_log1p(L):
        return np.exp(log_expm1(L) / p)

    def _log1p(x):
        with np.errstate(divide="ignore"):
            return np.logaddexp(0.0, p * np.log(x))

    return OrliczFunction(
        label=f"power:{p:g}",
        _eval=lambda x: x**p,
        _log1p=_log1p,
        _deriv=lambda x: p * x ** (p - 1),
        _inv=lambda y: y ** (1.0 / p),
        _inv_log1p=_inv_log1p,
        _log_psi=lambda x: p * np.log(x),
        x0=x0,
    )


def exponential(x0: float = 10.0) -> OrliczFunction:
    """``Psi(x) = e^x - 1``."""
    return OrliczFunction(
        label="exp",
        _eval=np.expm1,
        _log1p=lambda x: x.copy(),
        _deriv=np.exp,
        _inv=np.log1p,
        _inv_log1p=lambda L: L.copy(),
        _log_psi=lambda x: log_expm1(x),
        x0=x0,
    )


def psi2(x0: float = 10.0) -> OrliczFunction:
    """``Psi_2(x) = e^{x^2} - 1``."""
    return OrliczFunction(
        label="psi2",
        _eval=lambda x: np.expm1(x * x),
        _log1p=lambda x: x * x,
        _deriv=lambda x: 2 * x * np.exp(x * x),
        _inv=lambda y: np.sqrt(np.log1p(y)),
        _inv_log1p=np.sqrt,
        _log_psi=lambda x: log_expm1(x * x),
        x0=x0,
    )


_LOGLOG_SHIFT = math.exp(math.log(2.0) * math.log(math.log(2.0)))


def loglog(x0: float = 10.0) -> OrliczFunction:
    """``Psi(x) = exp[log(x+2) log log(x+2)] - 2^{log log 2}``."""
    c = _LOGLOG_SHIFT

    def g(x):
        u = np.log(x + 2.0)
        return u * np.log(u)

    def _log1p(x):
        gx = g(x)
        # log(1 - c + e^g) computed as g + log1p((1 - c) e^{-g})
        return gx + np.log1p((1.0 - c) * np.exp(-gx))

    def _deriv(x):
        u = np.log(x + 2.0)
        return np.exp(g(x)) * (np.log(u) + 1.0) / (x + 2.0)

    def _log_psi(x):
        gx = g(x)
        # log(e^g - c) = g + log1p(-c e^{-g})
        return gx + np.log1p(-c * np.exp(-gx))

    return OrliczFunction(
        label="loglog",
        _eval=lambda x: np.exp(g(x)) - c,
        _log1p=_log1p,
        _deriv=_deriv,
        _log_psi=_log_psi,
        x0=x0,
    )


def logpow(alpha: float, x0: float = 10.0) -> OrliczFunction:
    """``Psi(x) = exp((log(x+1))^alpha) - 1`` with ``alpha > 1``."""
    a = float(alpha)
    if not a > 1:
        raise DomainError("logpow needs alpha > 1")

    def _deriv(x):
        ell = np.log1p(x)
        return np.exp(ell**a) * a * ell ** (a - 1) / (1.0 + x)

    return OrliczFunction(
        label=f"logpow:{a:g}",
        _eval=lambda x: np.expm1(np.log1p(x) ** a),
        _log1p=lambda x: np.log1p(x) ** a,
        _deriv=_deriv,
        _inv=lambda y: np.expm1(np.log1p(y) ** (1.0 / a)),
        _inv_log1p=lambda L: np.expm1(L ** (1.0 / a)),
        _log_psi=lambda x: log_expm1(np.log1p(x) ** a),
        x0=x0,
    )


def linear_splice(
    knot: float,
    tail_eval: Callable,
    tail_log_psi: Callable,
    tail_deriv: Callable,
    label: str,
    tail_inv: Callable | None = None,
    tail_inv_log: Callable | None = None,
    x0: float = 10.0,
) -> OrliczFunction:
    """Join the line ``x Psi_t(knot)/knot`` below ``knot`` to a tail ``Psi_t``.

    Parameters
    ----------
    knot : float
        Junction point; the linear piece has slope ``Psi_t(knot)/knot``.
    tail_eval, tail_log_psi, tail_deriv : callable
        The tail function, its logarithm and its derivative on
        ``[knot, inf)``.
    tail_inv, tail_inv_log : callable, optional
        Inverse of the tail from values and from ``log`` of values.

    Raises
    ------
    DomainError
        If the junction is not continuous or breaks convexity.
    """
    knot = float(knot)
    value = float(tail_eval(np.array(knot)))
    slope = value / knot
    if abs(slope * knot - value) > 1e-12 * value:
        raise DomainError("splice is not continuous at the knot")
    if float(tail_deriv(np.array(knot))) < slope * (1 - 1e-12):
        raise DomainError("splice breaks convexity at the knot")
    log_slope = math.log(slope)
    log_value = math.log(value)

    def _log_psi(x):
        out = np.empty_like(x)
        hi = x >= knot
        with np.errstate(divide="ignore"):
            out[~hi] = log_slope + np.log(x[~hi])
        out[hi] = tail_log_psi(x[hi])
        return out

    def _eval(x):
        out = np.empty_like(x)
        hi = x >= knot
        out[~hi] = slope * x[~hi]
        with np.errstate(over="ignore"):
            out[hi] = tail_eval(x[hi])
        return out

    def _log1p(x):
        return np.logaddexp(0.0, _log_psi(x))

    def _deriv(x):
        out = np.full_like(x, slope)
        hi = x > knot
        out[hi] = tail_deriv(x[hi])
        return out

    inv = inv_log1p = None
    if tail_inv is not None and tail_inv_log is not None:

        def inv(y):
            out = np.empty_like(y)
            hi = y >= value
            out[~hi] = y[~hi] / slope
            out[hi] = tail_inv(y[hi])
            return out

        def inv_log1p(L):
            lg = log_expm1(L)
            out = np.empty_like(L)
            hi = lg >= log_value
            out[~hi] = np.exp(lg[~hi] - log_slope)
            out[hi] = tail_inv_log(lg[hi])
            return out

    return OrliczFunction(
        label=label,
        _eval=_eval,
        _log1p=_log1p,
        _deriv=_deriv,
        _inv=inv,
        _inv_log1p=inv_log1p,
        _log_psi=_log_psi,
        x0=x0,
    )


def spliced_logsq(x0: float = 10.0) -> OrliczFunction:
    """``exp((log x)^2)`` above ``sqrt(e)``, ``e^{-1/4} x`` below.

    The junction is C^1: both pieces have value ``e^{1/4}`` and slope
    ``e^{-1/4}`` at ``sqrt(e)``.
    """
    psi = linear_splice(
        math.sqrt(math.e),
        tail_eval=lambda x: np.exp(np.log(x) ** 2),
        tail_log_psi=lambda x: np.log(x) ** 2,
        tail_deriv=lambda x: np.exp(np.log(x) ** 2) * 2 * np.log(x) / x,
        label="spliced-logsq",
        tail_inv=lambda y: np.exp(np.sqrt(np.log(y))),
        tail_inv_log=lambda lg: np.exp(np.sqrt(lg)),
        x0=x0,
    )
    knot = math.sqrt(math.e)
    assert abs(psi.eval(knot) - math.exp(0.25)) <= 1e-15 * math.exp(0.25)
    return psi


def x2logx_spliced(x0: float = 10.0) -> OrliczFunction:
    """``x^2 log x`` above ``e``, the line ``e x`` below."""
    return linear_splice(
        math.e,
        tail_eval=lambda x: x * x * np.log(x),
        tail_log_psi=lambda x: 2 * np.log(x) + np.log(np.log(x)),
        tail_deriv=lambda x: 2 * x * np.log(x) + x,
        label="x2logx-spliced",
        x0=x0,
    )


def piecewise_linear(breakpoints: Sequence[float], slopes: Sequence[float],
                     label: str = "piecewise-linear", x0: float = 10.0) -> OrliczFunction:
    """Convex piecewise linear function through the origin.

    Parameters
    ----------
    breakpoints : sequence of float
        Increasing breakpoints ``b_1 < b_2 < ...``, all positive.
    slopes : sequence of float
        ``len(breakpoints) + 1`` nondecreasing slopes; ``slopes[0]`` applies
        on ``[0, b_1]`` and the last slope beyond the last breakpoint.
    """
    b = np.asarray(breakpoints, dtype=float)
    s = np.asarray(slopes, dtype=float)
    if b.ndim != 1 or s.shape != (b.size + 1,):
        raise DomainError("need one more slope than breakpoints")
    if np.any(np.diff(b) <= 0) or b[0] <= 0:
        raise DomainError("breakpoints must be positive and increasing")
    if np.any(np.diff(s) < 0) or s[0] <= 0:
        raise DomainError("slopes must be positive and nondecreasing")
    knots = np.concatenate([[0.0], b])
    values = np.concatenate([[0.0], np.cumsum(s[:-1] * np.diff(knots))])

    def _eval(x):
        i = np.searchsorted(knots, x, side="right") - 1
        return values[i] + s[i] * (x - knots[i])

    def _deriv(x):
        i = np.searchsorted(knots, x, side="left") - 1
        return s[np.maximum(i, 0)]

    def _inv(y):
        i = np.searchsorted(values, y, side="right") - 1
        return knots[i] + (y - values[i]) / s[i]

    return OrliczFunction(
        label=label,
        _eval=_eval,
        _log1p=lambda x: np.log1p(_eval(x)),
        _deriv=_deriv,
        _inv=_inv,
        _log_psi=lambda x: np.log(_eval(x)),
        x0=x0,
    )


def catalog_names() -> tuple[str, ...]:
    """Names accepted by :func:`catalog` (parametric ones shown with a sample)."""
    return ("power:p", "exp", "psi2", "loglog", "logpow:alpha", "spliced-logsq")


def catalog(name: str, x0: float = 10.0) -> OrliczFunction:
    """Build a catalog Orlicz function from its name.

    Examples
    --------
    >>> catalog("psi2").eval(1.0)  # doctest: +ELLIPSIS
    1.718...
    """
    name = name.strip()
    head, _, arg = name.partition(":")
    if head == "power":
        return power(_parse_param(arg, name), x0)
    if head == "logpow":
        return logpow(_parse_param(arg, name), x0)
    if arg:
        raise DomainError(f"unknown Orlicz function {name!r}")
    table = {"exp": exponential, "psi2": psi2, "loglog": loglog,
             "spliced-logsq": spliced_logsq}
    if head not in table:
        raise DomainError(f"unknown Orlicz function {name!r}")
    return table[head](x0)


def _parse_param(arg: str, name: str) -> float:
    try:
        if "/" in arg:
            num, den = arg.split("/")
            return float(num) / float(den)
        return float(arg)
    except ValueError:
        raise DomainError(f"bad parameter in {name!r}") from None


# ---------------------------------------------------------------------------
# Functional forms of the basic operations
# ---------------------------------------------------------------------------

def eval_psi(psi: OrliczFunction, x):
    """Return ``Psi(x)``."""
    return psi.eval(x)


def inverse(psi: OrliczFunction, y):
    """Return ``Psi^{-1}(y)`` to relative tolerance about 1e-15."""
    return psi.inverse(y)


def chi_eval(psi: OrliczFunction, K: float, x):
    """Return ``chi_K(x) = Psi(K Psi^{-1}(x))``."""
    if not K > 0:
        raise DomainError("chi needs K > 0")
    return ChiFunction(psi, float(K))(x)


def complementary_eval(psi: OrliczFunction, y):
    """Return the complementary function ``Phi(y) = sup_t (y t - Psi(t))``.

    The maximizer solves ``Psi'(t) = y``; it is bracketed by doubling from
    ``[0, 1]`` and refined by bisection on the left derivative.

    Raises
    ------
    ConvergenceError
        If the maximizer is not bracketed within the iteration cap.
    """
    arr = _as_float_array(y, "y")
    flat = np.atleast_1d(arr).astype(float)
    lo = np.zeros_like(flat)
    hi = np.ones_like(flat)
    for _ in range(_MAX_ITER):
        short = psi.deriv(hi) < flat
        if not np.any(short):
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2 * hi, hi)
    else:
        raise ConvergenceError("complementary maximizer escaped its bracket")
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        below = psi.deriv(mid) < flat
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= _BISECT_RTOL * np.maximum(hi, 1e-300)):
            break
    # The concave objective is maximal on [lo, hi]; keep the better endpoint.
    vals = np.maximum(flat * lo - psi.eval(lo), flat * hi - psi.eval(hi))
    vals = np.maximum(vals, 0.0)
    vals[flat == 0] = 0.0
    return _unwrap(vals.reshape(np.shape(arr)), y)


def complementary_inverse(psi: OrliczFunction, v: float) -> float:
    """Return ``Phi^{-1}(v)`` by bisection on the complementary function."""
    v = float(v)
    if v < 0 or not math.isfinite(v):
        raise DomainError("complementary_inverse needs v >= 0")
    if v == 0:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(_MAX_ITER):
        if complementary_eval(psi, hi) >= v:
            break
        lo, hi = hi, 2 * hi
    else:
        raise ConvergenceError("complementary inverse bracket did not close")
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if complementary_eval(psi, mid) < v:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _BISECT_RTOL * hi:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Growth conditions
# ---------------------------------------------------------------------------

CONDITIONS = ("delta0", "delta1", "delta2", "nabla0", "nabla1", "nabla2")

_DEFAULT_WITNESSES = {
    "delta0": (2.0, 4.0, 8.0),
    "delta1": (1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0),
    "delta2": (1.25, math.sqrt(2.0), 1.5, 2.0, 3.0, 4.0, 6.0, 8.0),
    "nabla0": (1.0, 1.5, 2.0, 4.0),
    "nabla1": (1.0, 2.0, 4.0, 8.0, 16.0),
    "nabla2": (1.25, 1.5, 2.0, 4.0, 8.0),
}

_ALIASES = {"Δ⁰": "delta0", "Δ¹": "delta1", "Δ²": "delta2",
            "∇₀": "nabla0", "∇₁": "nabla1", "∇₂": "nabla2"}

HOLDS = "holds-on-grid"
FAILS = "fails-on-grid"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GrowthEvidence:
    """Finite-scale evidence for one growth condition.

    Attributes
    ----------
    condition : str
        One of :data:`CONDITIONS`.
    witness : float
        The constant (``alpha``, ``beta``, ``b`` or ``C``) that was tested.
    grid : numpy.ndarray
        Geometric x-grid.
    ratios : numpy.ndarray
        Per grid point, the log-space margin of the defining inequality
        (nonnegative where it holds); for ``delta0`` the log ratio
        ``log Psi(beta x) - log Psi(x)``.
    verdict : str
        ``"holds-on-grid"``, ``"fails-on-grid"`` or ``"inconclusive"``.
    """

    condition: str
    witness: float
    grid: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)
    verdict: str

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "witness": self.witness,
            "verdict": self.verdict,
            "grid_min": float(self.grid[0]),
            "grid_max": float(self.grid[-1]),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def default_grid(psi: OrliczFunction, decades: float = 6.0, per_decade: int = 10) -> np.ndarray:
    """Geometric grid ``[x0, 10^decades x0]``."""
    n = int(round(decades * per_decade)) + 1
    return psi.x0 * np.logspace(0.0, decades, n)


def _margin_tol(*terms) -> np.ndarray:
    scale = np.maximum.reduce([np.abs(t) for t in terms] + [np.ones_like(terms[0])])
    return 1e-10 * scale


def _evaluate(psi: OrliczFunction, cond: str, w: float, x: np.ndarray,
              threshold: float) -> GrowthEvidence:
    lp = psi.log_psi(x)
    if cond == "delta2":
        rhs = psi.log_psi(w * x)
        margin = rhs - 2 * lp
        ok = margin >= -_margin_tol(rhs, lp)
    elif cond == "delta1":
        rhs = psi.log_psi(w * x)
        margin = rhs - np.log(x) - lp
        ok = margin >= -_margin_tol(rhs, lp)
    elif cond == "nabla2":
        rhs = psi.log_psi(w * x)
        margin = rhs - math.log(2 * w) - lp
        ok = margin >= -_margin_tol(rhs, lp)
    elif cond == "nabla1":
        xy = np.outer(x, x)
        rhs = psi.log_psi(w * xy)
        lhs = lp[:, None] + lp[None, :]
        full = rhs - lhs
        okm = full >= -_margin_tol(rhs, lhs)
        margin = full.min(axis=1)
        ok = okm.all(axis=1)
    elif cond == "nabla0":
        left = psi.log_psi(2 * x) - lp
        right = psi.log_psi(2 * w * x) - lp
        full = right[None, :] - left[:, None]
        tol = _margin_tol(np.broadcast_to(right[None, :], full.shape),
                          np.broadcast_to(left[:, None], full.shape))
        upper = np.triu(np.ones_like(full, dtype=bool))
        okm = (full >= -tol) | ~upper
        margin = np.where(upper, full, np.inf).min(axis=1)
        ok = okm.all(axis=1)
    elif cond == "delta0":
        ratio = psi.log_psi(w * x) - lp
        if not np.all(np.isfinite(ratio)):
            return GrowthEvidence(cond, w, x, ratio, INCONCLUSIVE)
        steps = np.diff(ratio)
        increasing = bool(np.all(steps >= -_margin_tol(ratio[1:], ratio[:-1])))
        rises = ratio[-1] - ratio[0] >= math.log(2.0)
        if increasing and rises and ratio[-1] >= math.log(threshold):
            verdict = HOLDS
        elif increasing and rises:
            verdict = INCONCLUSIVE
        else:
            verdict = FAILS
        return GrowthEvidence(cond, w, x, ratio, verdict)
    else:  # pragma: no cover - guarded by caller
        raise DomainError(cond)
    if not np.all(np.isfinite(margin[np.isfinite(lp)])):
        return GrowthEvidence(cond, w, x, margin, INCONCLUSIVE)
    verdict = HOLDS if bool(np.all(ok)) else FAILS
    return GrowthEvidence(cond, w, x, margin, verdict)


def classify_growth(psi: OrliczFunction, condition: str, witness: float | None = None,
                    grid=None, divergence_threshold: float = 1e3) -> GrowthEvidence:
    """Test a growth condition on a finite geometric grid.

    Parameters
    ----------
    psi : OrliczFunction
    condition : str
        One of ``delta0, delta1, delta2, nabla0, nabla1, nabla2``.
    witness : float, optional
        The constant to test.  When omitted a small default set is scanned
        and the first witness that holds is reported (otherwise the one with
        the largest worst-case margin).
    grid : array_like, optional
        Geometric grid; only points ``>= x0`` are used.  Defaults to
        ``[x0, 10^6 x0]`` with 10 points per decade.
    divergence_threshold : float
        For ``delta0``, the ratio ``Psi(beta x)/Psi(x)`` must exceed this at
        the top of the grid.

    Returns
    -------
    GrowthEvidence
        Finite-scale evidence; never a proof.
    """
    cond = _ALIASES.get(condition, condition)
    if cond not in CONDITIONS:
        raise DomainError(f"unknown growth condition {condition!r}")
    x = default_grid(psi) if grid is None else np.asarray(grid, dtype=float)
    x = x[x >= psi.x0]
    if x.size == 0:
        raise DomainError("empty grid above x0")
    if witness is not None:
        return _evaluate(psi, cond, float(witness), x, divergence_threshold)
    best: GrowthEvidence | None = None
    for w in _DEFAULT_WITNESSES[cond]:
        ev = _evaluate(psi, cond, float(w), x, divergence_threshold)
        if ev.holds:
            return ev
        if best is None or _score(ev) > _score(best):
            best = ev
    assert best is not None
    return best


def _score(ev: GrowthEvidence) -> float:
    rank = {HOLDS: 2, INCONCLUSIVE: 1, FAILS: 0}[ev.verdict]
    finite = ev.ratios[np.isfinite(ev.ratios)]
    worst = float(finite.min()) if finite.size else -math.inf
    return rank * 1e300 + (0.0 if ev.condition == "delta0" else worst)


# ---------------------------------------------------------------------------
# Tail integral and kappa convexity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChiTail:
    """Partial integral of ``1/chi_B`` with a divergence diagnostic."""

    value: float
    value_at_tenth: float
    diverging: bool


def chi_tail_integral(psi: OrliczFunction, B: float, upper: float,
                      rel_threshold: float = 0.1) -> ChiTail:
    """Partial integral ``int_{Psi(1)}^{upper} dx / chi_B(x)``.

    The integral is computed in the variable ``s = log x`` with adaptive
    quadrature.  It is flagged diverging when the contributions between
    ``upper/10`` and ``upper`` exceed ``rel_threshold`` of the total.

    Raises
    ------
    NumericError
        If the adaptive quadrature reports failure.
    """
    if not B > 1:
        raise DomainError("chi_tail_integral needs B > 1")
    lower = psi.eval(1.0)
    if not upper >= lower:
        raise DomainError("upper must be at least Psi(1)")

    def integrand(s):
        x = math.exp(s)
        log_chi = float(psi.log_psi(B * psi.inverse_log1p(math.log1p(x))))
        return math.exp(s - log_chi)

    def partial(top):
        if top <= lower:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, _ = integrate.quad(integrand, math.log(lower), math.log(top),
                                        limit=500, epsabs=0.0, epsrel=1e-10)
            except integrate.IntegrationWarning as exc:
                raise NumericError(f"tail quadrature failed: {exc}") from exc
        return val

    full = partial(upper)
    tenth = partial(upper / 10.0)
    diverging = full > 0 and (full - tenth) > rel_threshold * full
    return ChiTail(full, tenth, bool(diverging))


@dataclass(frozen=True)
class KappaReport:
    """Second-difference test of ``kappa(t) = log Psi(e^t)``."""

    convex: bool
    min_second_difference: float
    tolerance: float
    grid: np.ndarray = field(repr=False)

    @property
    def verdict(self) -> str:
        return "convex-on-grid" if self.convex else "non-convex-on-grid"


def kappa_convexity_check(psi: OrliczFunction, grid=None) -> KappaReport:
    """Check convexity of ``kappa(t) = log Psi(e^t)`` on a geometric grid.

    Convexity of ``kappa`` is sufficient for the condition ``nabla0`` with
    ``C = 1``.  The grid must be geometric, so that ``log x`` is uniform.
    """
    x = default_grid(psi) if grid is None else np.asarray(grid, dtype=float)
    t = np.log(x)
    dt = np.diff(t)
    if x.size < 3 or np.ptp(dt) > 1e-9 * np.max(np.abs(dt)):
        raise DomainError("kappa check needs a geometric grid with >= 3 points")
    kappa = psi.log_psi(x)
    second = kappa[2:] - 2 * kappa[1:-1] + kappa[:-2]
    tol = 1e-10 * float(np.max(np.abs(kappa)))
    return KappaReport(bool(np.all(second >= -tol)), float(second.min()), tol, x)
