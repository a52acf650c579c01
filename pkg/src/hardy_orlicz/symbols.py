"""Analytic self-maps of the unit disk, boundary traces and test functions.

Every symbol is an immutable :class:`Symbol` built by :func:`construct`.
Kinds with a closed-form boundary function (the lens map, the singular inner
function, their product, Blaschke products, automorphisms, step outer
functions) produce exact traces; a sampled outer function is traced on the
circle of radius ``1 - delta``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CapacityError, DomainError
from .measures import BoundarySample, luxemburg_norm
from .orlicz import OrliczFunction, classify_growth

__all__ = [
    "Symbol",
    "KINDS",
    "construct",
    "from_spec",
    "boundary_trace",
    "blaschke_levels",
    "blaschke_tail_bound",
    "poisson_kernel",
    "poisson_arc_mass",
    "poisson_cdf",
    "poisson_sup",
    "PSummingSymbol",
    "make_psummming_symbol",
    "power_norms",
    "TestFunction",
]

KINDS = (
    "lens",
    "singular_inner",
    "phi2",
    "finite_blaschke",
    "paper_blaschke",
    "outer",
    "constant",
    "identity",
    "z_times_B",
    "automorphism",
)

_MAX_ZEROS = 1 << 20
_CHUNK = 1 << 22  # complex entries per vectorized block


def _reduce(theta):
    """Reduce angles to ``(-pi, pi]``."""
    t = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(t == -np.pi, np.pi, t)


@dataclass(frozen=True)
class Symbol:
    """Analytic self-map of the disk.

    Attributes
    ----------
    kind : str
        One of :data:`KINDS`.
    params : dict
        JSON-serializable construction parameters.
    phi0 : complex
        ``phi(0)``.
    inner : bool
        True when ``|phi*| = 1`` almost everywhere.
    contact : tuple of float
        Boundary angles where ``|phi*|`` reaches 1 in a non-generic way; these
        are added to the centre grids of Carleson profiles.
    meta : dict
        Derived data (zeros, arcs, moduli).
    """

    kind: str
    params: dict
    _eval: Callable = field(repr=False)
    _modarg: Callable | None = field(default=None, repr=False)
    _boundary: Callable | None = field(default=None, repr=False)
    phi0: complex = 0j
    inner: bool = False
    contact: tuple = ()
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Evaluate ``phi`` at points of the open disk."""
        z = np.asarray(z, dtype=complex)
        out = _chunked(self._eval, z)
        return out if out.ndim else complex(out)

    @property
    def has_boundary_formula(self) -> bool:
        return self._boundary is not None

    def boundary(self, theta):
        """Closed-form boundary values ``phi*(e^{i theta})``."""
        if self._boundary is None:
            raise DomainError(f"{self.kind} has no closed-form boundary function")
        return self._boundary(np.asarray(theta, dtype=float))

    def boundary_formula(self, theta):
        """Return ``(modulus, argument)`` of ``phi*(e^{i theta})``.

        For the lens map and its product with the singular inner function the
        argument is the unreduced closed form, e.g. ``theta/2 - cot(theta/2)``
        with ``theta`` in ``(-pi, pi]``.
        """
        theta = np.asarray(theta, dtype=float)
        if self._modarg is not None:
            return self._modarg(theta)
        v = self.boundary(theta)
        return np.abs(v), np.angle(v)

    def to_spec(self) -> dict:
        return {"kind": self.kind, "params": self.params}

    def to_json(self) -> str:
        return json.dumps(self.to_spec(), sort_keys=True)


def _chunked(fn, z):
    flat = np.atleast_1d(z).ravel()
    step = max(1, _CHUNK // 64)
    if flat.size <= step:
        return np.asarray(fn(flat)).reshape(z.shape)
    parts = [fn(flat[i:i + step]) for i in range(0, flat.size, step)]
    return np.concatenate(parts).reshape(z.shape)


# ---------------------------------------------------------------------------
# Poisson kernel
# ---------------------------------------------------------------------------

def poisson_kernel(z, theta):
    """``P_z(e^{i theta}) = (1 - |z|^2) / |e^{i theta} - z|^2``."""
    z = np.asarray(z, dtype=complex)
    u = np.exp(1j * np.asarray(theta, dtype=float))
    return (1 - np.abs(z) ** 2) / np.abs(u - z) ** 2


def poisson_sup(a) -> float:
    """``||P_a||_inf = (1 + |a|) / (1 - |a|)``."""
    r = abs(complex(a))
    return (1 + r) / (1 - r)


def poisson_cdf(a, t):
    """Unwrapped antiderivative of ``P_a dm`` in ``t``, zero at ``t = arg a``.

    Differences ``poisson_cdf(a, t2) - poisson_cdf(a, t1)`` give the mass of
    the arc ``(t1, t2)`` for any ``t1 <= t2``.
    """
    a = complex(a)
    rho, beta = abs(a), (math.atan2(a.imag, a.real) if a else 0.0)
    k = (1 + rho) / (1 - rho)
    u = np.asarray(t, dtype=float) - beta
    n = np.round(u / (2 * np.pi))
    ub = u - 2 * np.pi * n
    return n + np.arctan(k * np.tan(ub / 2)) / np.pi


def poisson_arc_mass(a, t1, t2):
    """Mass of the arc ``(t1, t2)`` under ``P_a dm``."""
    return poisson_cdf(a, t2) - poisson_cdf(a, t1)


# ---------------------------------------------------------------------------
# Blaschke products
# ---------------------------------------------------------------------------

def blaschke_levels(N: int) -> list[dict]:
    """Per-level parameters ``r_n = 1 - 2^-n`` and ``p_n = floor(2^(n - sqrt n)) + 1``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    out = []
    for n in range(1, N + 1):
        r = 1.0 - 2.0 ** (-n)
        p = int(math.floor(2.0 ** (n - math.sqrt(n)))) + 1
        out.append({
            "n": n,
            "r": r,
            "p": p,
            "eps": 1.0 / math.sqrt(n),
            "mass": p * (1.0 - r),
            "mass_bound": 2.0 * 2.0 ** (-math.sqrt(n)),
        })
    return out


def blaschke_tail_bound(N: int) -> float:
    """``sum_{n > N} 2 * 2^(-sqrt n)``, summed to double precision."""
    total = 0.0
    n = N + 1
    while True:
        term = 2.0 * 2.0 ** (-math.sqrt(n))
        total += term
        if term < 1e-18 * max(total, 1e-300):
            return total
        n += 1


def _blaschke_eval(zeros):
    zeros = np.asarray(zeros, dtype=complex)
    units = np.where(zeros == 0, 1.0, np.abs(zeros) / np.where(zeros == 0, 1.0, zeros))

    def f(z):
        out = np.ones(z.shape, dtype=complex)
        for zn, c in zip(zeros, units):
            if zn == 0:
                out *= z
            else:
                out *= c * (zn - z) / (1 - np.conj(zn) * z)
        return out

    return f, complex(np.prod(np.where(zeros == 0, 0.0, np.abs(zeros))))


# ---------------------------------------------------------------------------
# Outer functions
# ---------------------------------------------------------------------------

def _outer_sampled(h):
    h = np.asarray(h, dtype=float)
    m = h.size
    if m < 2 or m & (m - 1):
        raise DomainError("outer modulus sample needs a power-of-two length")
    if not np.all(np.isfinite(h)) or np.any(h <= 0):
        raise DomainError("log h is not integrable: the modulus sample has zeros")
    if np.any(h > 1):
        raise DomainError("boundary modulus must be <= 1 for a self-map")
    if np.all(h == 1):
        raise DomainError("h = 1 everywhere gives a unimodular constant")
    g = np.log(h)
    u = np.exp(2j * np.pi * np.arange(m) / m)
    # Analytic Fourier coefficients of the trigonometric interpolant of log h.
    c = np.fft.fft(g) / m
    d = np.zeros(m // 2 + 1, dtype=complex)
    d[0] = c[0].real
    d[1:m // 2] = 2 * c[1:m // 2]
    d[m // 2] = c[m // 2].real

    def f(z):
        # Trapezoidal Herglotz integral on the h-grid, in blocks.
        z = np.atleast_1d(z)
        out = np.empty(z.shape, dtype=complex)
        step = max(1, _CHUNK // m)
        for i in range(0, z.size, step):
            zz = z[i:i + step, None]
            out[i:i + step] = np.exp(((u + zz) / (u - zz)) @ g / m)
        return out

    return f, d, complex(math.exp(c[0].real))


def _step_outer(edges, moduli):
    """Outer function with ``|phi*| = moduli[k]`` on ``[edges[k], edges[k+1])``."""
    edges = np.asarray(edges, dtype=float)
    logs = np.log(np.asarray(moduli, dtype=float))

    def log_phi(z):
        acc = np.zeros(z.shape, dtype=complex)
        for a, b, lr in zip(edges[:-1], edges[1:], logs):
            la = np.log(1 - z * np.exp(-1j * a))
            lb = np.log(1 - z * np.exp(-1j * b))
            acc += lr * ((b - a) - 2j * (lb - la)) / (2 * np.pi)
        return acc

    def modarg(theta):
        t = np.mod(theta, 2 * np.pi)
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, logs.size - 1)
        mod = np.exp(logs[idx])
        arg = np.zeros_like(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            for a, b, lr in zip(edges[:-1], edges[1:], logs):
                arg -= lr / np.pi * (np.log(np.abs(2 * np.sin((t - b) / 2)))
                                     - np.log(np.abs(2 * np.sin((t - a) / 2))))
        return mod, arg

    def boundary(theta):
        mod, arg = modarg(theta)
        with np.errstate(invalid="ignore"):
            return mod * np.exp(1j * arg)

    return (lambda z: np.exp(log_phi(z))), modarg, boundary, complex(math.exp(
        float(np.sum(logs * np.diff(edges))) / (2 * np.pi)))


def _herglotz_circle(d, r, q):
    """``log phi`` at ``q`` equispaced points of radius ``r`` from analytic coefficients."""
    k = np.arange(d.size)
    folded = np.zeros(q, dtype=complex)
    np.add.at(folded, k % q, d * r ** k)
    return np.fft.ifft(folded) * q


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _check_grid():
    r = 1.0 - np.geomspace(1.0, 1e-4, 100)
    t = 2 * np.pi * np.arange(100) / 100
    return r, t


def _check_self_map(sym: Symbol) -> None:
    r, t = _check_grid()
    if sym.kind == "outer" and "d" in sym.meta:
        d = sym.meta["d"]
        mods = np.stack([np.exp(_herglotz_circle(d, rr, t.size).real) for rr in r])
    else:
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        mods = np.abs(sym.eval(z))
    if not np.all(mods < 1.0):
        raise DomainError(f"{sym.kind}: |phi(z)| >= 1 at a check point")


def construct(kind: str, **params) -> Symbol:
    """Build a symbol of the given kind.

    Parameters by kind:

    ``lens``, ``singular_inner``, ``phi2``, ``identity``
        none.
    ``constant``
        ``c`` with ``|c| < 1``.
    ``automorphism``
        ``a`` with ``|a| < 1``; ``phi(z) = (a - z) / (1 - conj(a) z)``.
    ``finite_blaschke``
        ``zeros``: list of points (complex, or ``[re, im]`` pairs).
    ``paper_blaschke``, ``z_times_B``
        ``N``: number of levels, zeros ``r_n omega_n^j``.
    ``outer``
        Either ``h``: positive boundary-modulus samples on a power-of-two
        grid, or ``edges`` and ``moduli`` for a step modulus.

    Raises
    ------
    DomainError
        On invalid parameters.
    CapacityError
        When a Blaschke product would need more than 2^20 zeros.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown symbol kind {kind!r}; known: {', '.join(KINDS)}")
    sym = _BUILDERS[kind](**params)
    _check_self_map(sym)
    return sym


def _lens():
    def modarg(theta):
        t = _reduce(theta)
        return np.cos(t / 2), t / 2

    return Symbol("lens", {}, lambda z: (1 + z) / 2, modarg,
                  lambda th: (1 + np.exp(1j * _reduce(th))) / 2, 0.5 + 0j, False, (0.0,))


def _singular_arg(t):
    with np.errstate(divide="ignore"):
        return -1.0 / np.tan(t / 2)


def _m_eval(z):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.exp(-(1 + z) / (1 - z))
    # Only z = 1 itself is singular; the radial limit there is 0.
    return np.where(np.isfinite(out), out, 0.0)


def _singular_inner():
    def modarg(theta):
        t = _reduce(theta)
        mod = np.where(t == 0, 0.0, 1.0)
        return mod, np.where(t == 0, 0.0, _singular_arg(t))

    def boundary(theta):
        mod, arg = modarg(theta)
        with np.errstate(invalid="ignore"):
            return mod * np.exp(1j * arg)

    return Symbol("singular_inner", {}, _m_eval, modarg, boundary, complex(math.exp(-1)),
                  True, (0.0,))


def _phi2():
    def modarg(theta):
        t = _reduce(theta)
        mod = np.where(t == 0, 0.0, np.cos(t / 2))
        return mod, np.where(t == 0, 0.0, t / 2 + _singular_arg(t))

    def boundary(theta):
        mod, arg = modarg(theta)
        with np.errstate(invalid="ignore"):
            return mod * np.exp(1j * arg)

    return Symbol("phi2", {}, lambda z: (1 + z) / 2 * _m_eval(z), modarg, boundary,
                  complex(0.5 * math.exp(-1)), False, (0.0,))


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _constant(c=0.5):
    c = _as_complex(c)
    if not abs(c) < 1:
        raise DomainError("constant symbol needs |c| < 1")
    return Symbol("constant", {"c": [c.real, c.imag]}, lambda z: np.full(z.shape, c),
                  None, lambda th: np.full(np.shape(th), c, dtype=complex), c)


def _identity():
    return Symbol("identity", {}, lambda z: z, None, lambda th: np.exp(1j * th), 0j, True)


def _automorphism(a=0.5):
    a = _as_complex(a)
    if not abs(a) < 1:
        raise DomainError("automorphism needs |a| < 1")

    def f(z):
        return (a - z) / (1 - np.conj(a) * z)

    return Symbol("automorphism", {"a": [a.real, a.imag]}, f, None,
                  lambda th: f(np.exp(1j * th)), a, True)


def _zeros_symbol(kind, zeros, params, times_z=False, meta=None):
    zeros = np.asarray(zeros, dtype=complex)
    if np.any(np.abs(zeros) >= 1):
        raise DomainError("Blaschke zeros must lie in the open disk")
    if zeros.size > _MAX_ZEROS:
        raise CapacityError(f"{zeros.size} zeros exceed the enumeration cap {_MAX_ZEROS}")
    all_zeros = np.concatenate([[0j], zeros]) if times_z else zeros
    f, b0 = _blaschke_eval(all_zeros)
    meta = dict(meta or {})
    meta["zeros"] = zeros
    return Symbol(kind, params, f, None, lambda th: f(np.exp(1j * th)), b0, True, (), meta)


def _finite_blaschke(zeros=()):
    zs = [_as_complex(z) for z in zeros]
    if not zs:
        raise DomainError("finite_blaschke needs at least one zero")
    return _zeros_symbol("finite_blaschke", zs, {"zeros": [[z.real, z.imag] for z in zs]})


def _paper_zeros(N):
    levels = blaschke_levels(int(N))
    total = sum(lv["p"] for lv in levels)
    if total > _MAX_ZEROS:
        raise CapacityError(f"paper_blaschke(N={N}) needs {total} zeros")
    zeros = np.concatenate([lv["r"] * np.exp(2j * np.pi * np.arange(lv["p"]) / lv["p"])
                            for lv in levels])
    return levels, zeros


def _paper_blaschke(N=6):
    levels, zeros = _paper_zeros(N)
    return _zeros_symbol("paper_blaschke", zeros, {"N": int(N)},
                         meta={"levels": levels, "tail_bound": blaschke_tail_bound(int(N))})


def _z_times_b(N=6):
    levels, zeros = _paper_zeros(N)
    return _zeros_symbol("z_times_B", zeros, {"N": int(N)}, times_z=True,
                         meta={"levels": levels, "tail_bound": blaschke_tail_bound(int(N))})


def _outer(h=None, edges=None, moduli=None):
    if h is not None:
        h = np.asarray(h, dtype=float)
        f, d, phi0 = _outer_sampled(h)
        return Symbol("outer", {"h_size": int(h.size)}, f, None, None, phi0, False, (),
                      {"h": h, "d": d})
    if edges is None or moduli is None:
        raise DomainError("outer needs h, or edges and moduli")
    edges = np.asarray(edges, dtype=float)
    moduli = np.asarray(moduli, dtype=float)
    if edges.size != moduli.size + 1 or np.any(np.diff(edges) <= 0):
        raise DomainError("edges must be increasing with one more entry than moduli")
    if not (math.isclose(edges[0], 0.0, abs_tol=1e-15)
            and math.isclose(edges[-1], 2 * math.pi, rel_tol=1e-12)):
        raise DomainError("step arcs must partition [0, 2 pi)")
    if np.any(moduli <= 0) or np.any(moduli > 1):
        raise DomainError("log h is not integrable or h exceeds 1")
    f, modarg, boundary, phi0 = _step_outer(edges, moduli)
    return Symbol("outer", {"edges": edges.tolist(), "moduli": moduli.tolist()}, f, modarg,
                  boundary, phi0, False, (), {"edges": edges, "moduli": moduli})


_BUILDERS = {
    "lens": _lens,
    "singular_inner": _singular_inner,
    "phi2": _phi2,
    "finite_blaschke": _finite_blaschke,
    "paper_blaschke": _paper_blaschke,
    "outer": _outer,
    "constant": _constant,
    "identity": _identity,
    "z_times_B": _z_times_b,
    "automorphism": _automorphism,
}


def from_spec(spec) -> Symbol:
    """Build a symbol from a JSON object, a JSON string, or a short name.

    Short names are a kind optionally followed by ``:value`` for the single
    parameter, e.g. ``"phi2"``, ``"constant:0.5"``, ``"paper_blaschke:6"``.
    """
    if isinstance(spec, Symbol):
        return spec
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DomainError(f"bad symbol JSON: {exc}") from exc
        else:
            kind, _, arg = text.partition(":")
            if not arg:
                return construct(kind)
            key = {"constant": "c", "automorphism": "a", "paper_blaschke": "N",
                   "z_times_B": "N"}.get(kind)
            if key is None:
                raise DomainError(f"symbol {kind!r} takes no short-form parameter")
            try:
                val = int(arg) if key == "N" else complex(arg.replace(" ", ""))
            except ValueError as exc:
                raise DomainError(f"bad parameter {arg!r} for {kind}") from exc
            return construct(kind, **{key: val})
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("symbol spec needs a 'kind'")
    return construct(spec["kind"], **dict(spec.get("params", {})))


# ---------------------------------------------------------------------------
# Boundary traces
# ---------------------------------------------------------------------------

def boundary_trace(phi: Symbol, n: int = 1 << 16, delta: float = 1e-6) -> BoundarySample:
    """Sample ``phi*`` on the grid ``theta_k = 2 pi k / n``.

    The closed form is used when the kind has one.  Otherwise ``phi`` is
    evaluated at ``(1 - delta) e^{i theta_k}``; for a sampled outer function
    this is done through the analytic Fourier coefficients of ``log h``
    damped by ``(1 - delta)^k``.  Closed-form samples that come out non-finite
    (jump points of a step outer function) are moved a tiny step forward.
    """
    n = int(n)
    if n < 2 or n & (n - 1):
        raise DomainError("trace size must be a power of two")
    if not 0 < delta <= 1e-3:
        raise DomainError("radial offset must lie in (0, 1e-3]")
    theta = 2 * np.pi * np.arange(n) / n
    if phi.has_boundary_formula:
        vals = phi.boundary(theta)
        # Step outer functions have no radial limit of the argument at arc ends.
        bad = ~np.isfinite(vals)
        if np.any(bad):
            # Nudge off the jump into the arc that starts there.
            vals[bad] = phi.boundary(theta[bad] + 1e-9 * 2 * np.pi / n)
        return BoundarySample(vals, exact=True)
    if phi.kind == "outer" and "d" in phi.meta:
        vals = _outer_trace(phi.meta["d"], n, 1 - delta)
    else:
        vals = phi.eval((1 - delta) * np.exp(1j * theta))
    return BoundarySample(vals, exact=False, delta=delta)


def _outer_trace(d, n, rho):
    m = 2 * (d.size - 1)
    k = np.arange(d.size)
    coef = d * rho ** k
    size = max(n, m)
    full = np.zeros(size, dtype=complex)
    full[: d.size] = coef
    logs = np.fft.ifft(full) * size
    vals = np.exp(logs)
    return vals[:: size // n]


# ---------------------------------------------------------------------------
# Test functions and power norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """``u_{a,r}(z) = ((1 - r) / (1 - conj(a) r z))^2``, optionally normalized.

    With ``normalized=True`` the function is ``g_{a,r} = Psi^{-1}(1/(1-r)) u_{a,r}``.
    """

    a: complex
    r: float
    normalized: bool = False
    psi: OrliczFunction | None = None

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not abs(abs(complex(self.a)) - 1) <= 1e-12:
            raise DomainError("a must be unimodular")
        if not 0 <= self.r < 1:
            raise DomainError("r must lie in [0, 1)")
        if self.normalized and self.psi is None:
            raise DomainError("normalized test functions need psi")

    @property
    def scale(self) -> float:
        if not self.normalized:
            return 1.0
        return float(self.psi.inverse_log1p(math.log1p(1.0 / (1.0 - self.r))))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.scale * ((1 - self.r) / (1 - np.conj(self.a) * self.r * z)) ** 2

    def boundary(self, theta):
        return self(np.exp(1j * np.asarray(theta, dtype=float)))

    @property
    def l1_norm(self) -> float:
        """Exact ``||u||_1 = (1 - r)/(1 + r)`` times the scale."""
        return self.scale * (1 - self.r) / (1 + self.r)


def power_norms(phi: Symbol, n: int, psi: OrliczFunction, size: int = 1 << 16,
                trace: BoundarySample | None = None) -> tuple[float, float]:
    """Return ``(||phi^n||_1, ||phi^n||_Psi)`` of the boundary trace under ``m``."""
    if n < 1:
        raise DomainError("power must be >= 1")
    tr = boundary_trace(phi, size) if trace is None else trace
    vals = np.abs(tr.values) ** n
    return float(np.mean(vals)), luxemburg_norm(vals, tr.weights, psi)


# ---------------------------------------------------------------------------
# Symbol that is order bounded but not p-summing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PSummingSymbol:
    """Step outer symbol together with the sequences used to build it.

    Attributes
    ----------
    symbol : Symbol
        Outer function with ``|phi*| = r_n`` on the arc ``B_n``.
    alpha : float
        ``Delta^2`` witness of ``psi``.
    M, beta, t, r, gap : ndarray
        ``M_n = log(n+1)``, the masses ``beta_n``, ``t_n``, ``r_n`` and
        ``1 - r_n``.
    c : float
        Normalization ``1 / sum beta_n``; arc ``B_n`` has measure ``c beta_n``.
    edges : ndarray
        Arc end points in ``[0, 2 pi]``.
    a : ndarray
        Unimodular points ``a_n``, the boundary value direction at the middle of
        ``B_n``.
    lower_bounds : ndarray
        ``(1/9) / (alpha M_n)``, the lower bound for ``||C_phi g_n||_Psi``.
    x : ndarray
        Thresholds ``x_n`` with ``Psi(x)/Psi(x/alpha) >= 2^n`` beyond them.
    """

    symbol: Symbol
    psi: OrliczFunction
    alpha: float
    M: np.ndarray
    beta: np.ndarray
    t: np.ndarray
    r: np.ndarray
    gap: np.ndarray
    c: float
    edges: np.ndarray
    a: np.ndarray
    lower_bounds: np.ndarray
    x: np.ndarray
    log_psi_t: np.ndarray
    warnings: tuple = ()

    @property
    def levels(self) -> int:
        return int(self.t.size)

    def arc_mass(self) -> np.ndarray:
        return self.c * self.beta

    def inverse_gap_integral(self) -> float:
        """``int 1/(1 - |phi*|) dm = sum c beta_n Psi(t_n)``."""
        return float(np.sum(self.c * self.beta * np.exp(self.log_psi_t)))

    def chi_identity_residuals(self) -> np.ndarray:
        """Relative error of ``chi_{M_n}(1/(1-r_n)) = 8/beta_n`` per level."""
        lhs = self.psi.log_psi(self.M * self.psi.inverse_log1p(np.log1p(1.0 / self.gap)))
        return np.abs(np.expm1(lhs - np.log(8.0 / self.beta)))


def _threshold_x(psi, alpha, n, start):
    """Smallest grid-checked ``x >= start`` with ``Psi(x)/Psi(x/alpha) >= 2^n``."""
    target = n * math.log(2.0)

    def gap(x):
        return float(psi.log_psi(x) - psi.log_psi(x / alpha)) - target

    x = start
    while gap(x) < 0:
        x *= 1.05
        if x > 1e300:
            raise DomainError("Psi(x)/Psi(x/alpha) stays bounded")
    return x


def make_psummming_symbol(psi: OrliczFunction, levels: int = 3,
                          max_log_psi: float = math.log(1e15)) -> PSummingSymbol:
    """Build the compact, order bounded, non p-summing composition symbol.

    ``beta`` is halved from ``beta_{n-1}/2`` until ``t_n > t_{n-1}`` and
    ``[Psi((t_1+...+t_{n-1})/alpha) + Psi(x_n)] 2^n t_n / Psi(t_n) <= 2^-n``.
    Levels stop early, with a warning, once ``1 - r_n`` drops below
    ``exp(-max_log_psi)``.

    Raises
    ------
    DomainError
        If ``psi`` fails ``Delta^2`` on the default grid, or ``levels`` is
        outside ``[1, 12]``.
    """
    if not 1 <= levels <= 12:
        raise DomainError("levels must lie in [1, 12]")
    ev = classify_growth(psi, "delta2")
    if not ev.holds:
        raise DomainError(f"{psi.label} is not in Delta^2 on the default grid")
    alpha = float(ev.witness)
    start = float(psi.inverse(1.0))
    M, beta, t, lpt, xs = [], [], [], [], []
    notes = []
    b = 1.0
    for n in range(1, levels + 1):
        Mn = math.log(n + 1)
        xn = _threshold_x(psi, alpha, n, max(start, xs[-1] if xs else start))
        s_prev = sum(t)
        log_head = math.log(float(psi.eval(s_prev / alpha)) + float(psi.eval(xn)))
        b /= 2.0
        accepted = None
        while True:
            tn = float(psi.inverse_log1p(math.log1p(8.0 / b))) / Mn
            lp = float(psi.log_psi(tn))
            if lp > max_log_psi:
                break
            ok_t = not t or tn > t[-1]
            ok_small = log_head + n * math.log(2.0) + math.log(tn) - lp <= -n * math.log(2.0)
            if ok_t and ok_small:
                accepted = (tn, lp)
                break
            b /= 2.0
        if accepted is None:
            notes.append(f"level cap reached at n={n}: 1 - r_n not representable")
            break
        M.append(Mn)
        beta.append(b)
        t.append(accepted[0])
        lpt.append(accepted[1])
        xs.append(xn)
    if not t:
        raise CapacityError("no level of the construction is representable")
    for msg in notes:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    M, beta, t, lpt, xs = map(np.asarray, (M, beta, t, lpt, xs))
    gap = np.exp(-lpt)
    r = 1.0 - gap
    c = 1.0 / float(np.sum(beta))
    edges = np.concatenate([[0.0], 2 * np.pi * np.cumsum(c * beta)])
    edges[-1] = 2 * np.pi
    sym = construct("outer", edges=edges, moduli=r)
    mids = 0.5 * (edges[:-1] + edges[1:])
    a = np.exp(1j * sym.boundary_formula(mids)[1])
    return PSummingSymbol(sym, psi, alpha, M, beta, t, r, gap, c, edges, a,
                          (1.0 / 9.0) / (alpha * M), xs, lpt, tuple(notes))
