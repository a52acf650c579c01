"""Named reproduction runs used by ``hardy-orlicz reproduce``.

Each runner returns an :class:`ExperimentResult` with one-line verdicts, a
JSON-serializable summary and the files it wrote.  Outputs depend only on the
arguments, so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bergman, carleson
from .measures import counterexample_2, counterexample_3, luxemburg_norm
from .orlicz import catalog, classify_growth
from .symbols import blaschke_tail_bound, boundary_trace, construct, make_psummming_symbol

__all__ = ["EXPERIMENTS", "ExperimentResult", "run_experiment", "rng"]

DEFAULT_SIZE = 1 << 22


@dataclass
class ExperimentResult:
    name: str
    verdicts: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    files: list[str] = field(default_factory=list)
    passed: bool = True

    def check(self, label: str, ok: bool, detail: str = "") -> None:
        """Record one verdict line."""
        self.passed &= bool(ok)
        self.verdicts.append(f"{label}: {'ok' if ok else 'FAILED'}" + (f" ({detail})" if detail else ""))

    def note(self, text: str) -> None:
        self.verdicts.append(text)


def rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _write_json(out: Path | None, name: str, obj, res: ExperimentResult) -> None:
    if out is None:
        return
    path = out / name
    path.write_text(json.dumps(carleson._jsonable(obj), sort_keys=True, indent=1) + "\n")
    res.files.append(str(path))


def _write_csv(out: Path | None, name: str, header, rows, res: ExperimentResult) -> None:
    if out is None:
        return
    import csv

    path = out / name
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if not isinstance(v, str) else v for v in row])
    res.files.append(str(path))


def _save_profile(out, name, prof, res):
    if out is not None:
        path = out / name
        prof.to_csv(path)
        res.files.append(str(path))


# ---------------------------------------------------------------------------

def _meme_module(out, size, seed, psi_name):
    res = ExperimentResult("meme-module")
    phi = construct("phi2")
    psi = catalog(psi_name or "psi2")
    prof = carleson.symbol_profile(phi, method="exact")
    slope = prof.slope(1e-4, 1e-2)
    _save_profile(out, "profile.csv", prof, res)
    emp = carleson.symbol_profile(phi, method="empirical", size=size,
                                  h_grid=carleson.default_h_grid(1e-1, 1e-4))
    emp_slope = emp.slope(1e-4, 1e-2)
    _save_profile(out, "profile_empirical.csv", emp, res)
    mc = carleson.mc_test(prof)
    tests = carleson.psi_carleson_test(prof, psi)
    res.check("exact-window slope in [1.4, 1.6]", 1.4 <= slope <= 1.6, f"slope={slope:.4f}")
    res.note(f"sampled-trace slope at n={size}: {emp_slope:.4f} (atoms of mass 1/n floor the profile)")
    res.check("MC holds", mc.holds is True)
    res.check(f"R0({psi.label}) fails", tests["R0"].holds is False)
    res.summary = {"slope_exact": slope, "slope_empirical": emp_slope, "size": size,
                   "MC": mc.holds, "R0": tests["R0"].holds, "psi": psi.label}
    _write_json(out, "summary.json", res.summary, res)
    return res


def _lens(out, size, seed, psi_name):
    res = ExperimentResult("lens")
    phi = construct("lens")
    psi = catalog(psi_name or "psi2")
    prof = carleson.symbol_profile(phi, method="exact")
    _save_profile(out, "profile.csv", prof, res)
    sel = (prof.h >= 1e-4 * (1 - 1e-12)) & (prof.h <= 1e-2 * (1 + 1e-12))
    ratio = prof.rho[sel] / prof.h[sel]
    res.check("rho(h)/h in [0.3, 0.8] on [1e-4, 1e-2]", bool(np.all((ratio >= 0.3) & (ratio <= 0.8))),
              f"min={ratio.min():.6f} max={ratio.max():.6f} 2/pi={2 / math.pi:.6f}")
    mc = carleson.mc_test(prof)
    res.check("MC fails", mc.holds is False)
    mu = carleson.pullback(boundary_trace(phi, min(size, 1 << 20)))
    xi = carleson.default_xi_grid(64, phi.contact)
    k1 = carleson.window_scaling_check(mu, xi, 1e-2)
    res.check("empirical k1 finite", math.isfinite(k1), f"k1={k1:.4f}")
    ob = carleson.order_bounded_check(phi, psi, A_grid=(1.0,))
    res.check(f"OB1({psi.label}, A=1) fails", ob["OB1"].holds is False)
    res.summary = {"ratio_min": ratio.min(), "ratio_max": ratio.max(), "k1": k1,
                   "MC": mc.holds, "OB1_A1": ob["OB1"].holds}
    _write_json(out, "summary.json", res.summary, res)
    return res


def _psummming(out, size, seed, psi_name):
    res = ExperimentResult("psummming")
    psi = catalog(psi_name or "psi2")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ps = make_psummming_symbol(psi, levels=3)
    for w in caught:
        res.note(f"warning: {w.message}")
    resid = ps.chi_identity_residuals()
    res.check("chi_{M_n}(1/(1-r_n)) = 8/beta_n", bool(np.all(resid < 1e-10)), f"max={resid.max():.2e}")
    res.check("t_n increasing", bool(np.all(np.diff(ps.t) > 0)))
    A_max = float(ps.M[-1])
    A_grid = tuple(a for a in (0.5, 1.0, A_max) if a <= A_max)
    ob = carleson.order_bounded_check(ps.symbol, psi, A_grid=A_grid)
    vals = [ob["OB1"].evidence["integrals"][str(A)]["value"] for A in A_grid]
    res.check(f"chi_A integral finite for A <= M_N = {A_max:.4f}", all(math.isfinite(v) for v in vals),
              ", ".join(f"A={A:g}: {v:.4g}" for A, v in zip(A_grid, vals)))
    # m(|phi*| > r) <= 8 c / chi_A(1/(1-r)) for r >= r_n once M_n >= A.
    r = 1 - np.geomspace(float(ps.gap[0]), float(ps.gap.min()) / 2, 60)
    tail = np.array([float(np.sum(ps.arc_mass()[ps.r > rr])) for rr in r])
    worst = 0.0
    for A in A_grid:
        start = ps.r[int(np.argmax(ps.M >= A * (1 - 1e-12)))]
        sel = r >= start
        bound = 8 * ps.c / carleson._chi(psi, A, 1.0 / (1 - r[sel]))
        worst = max(worst, float(np.max(tail[sel] / bound)))
    res.check("tail bound m(|phi|>r) <= 8c/chi_A(1/(1-r))", worst <= 1.0, f"max ratio={worst:.4f}")
    res.summary = {"psi": psi.label, "alpha": ps.alpha, "t": ps.t, "gap": ps.gap, "beta": ps.beta,
                   "c": ps.c, "M": ps.M, "lower_bounds": ps.lower_bounds,
                   "inverse_gap_integral": ps.inverse_gap_integral(), "chi_integrals": dict(zip(
                       [str(a) for a in A_grid], vals)), "warnings": list(ps.warnings)}
    _write_csv(out, "levels.csv", ("n", "t", "gap", "beta", "arc_mass", "lower_bound"),
               [(n + 1, ps.t[n], ps.gap[n], ps.beta[n], ps.arc_mass()[n], ps.lower_bounds[n])
                for n in range(ps.levels)], res)
    _write_json(out, "summary.json", res.summary, res)
    return res


def _blaschke(out, size, seed, psi_name, N=6):
    res = ExperimentResult("blaschke")
    B = construct("paper_blaschke", N=N)
    levels = B.meta["levels"]
    rN = levels[-1]["r"]
    count = max(100, int(1e4 * size / DEFAULT_SIZE))
    g = rng(seed)
    z = rN * np.sqrt(g.uniform(size=count)) * np.exp(2j * np.pi * g.uniform(size=count))
    exact_ok, minor_ok = 0, 0
    for zz in z:
        bb = bergman.blaschke_S_bound(B, zz)
        exact_ok += bb.modulus_sq <= bb.exp_bound
        minor_ok += bb.S >= bb.level_minorant
    res.check(f"|B_N|^2 <= exp(-S_N) at {count} random z", exact_ok == count, f"{exact_ok}/{count}")
    res.check("S_N >= level minorant", minor_ok == count, f"{minor_ok}/{count}")
    tail = blaschke_tail_bound(N)
    mass_ok = all(lv["mass"] <= lv["mass_bound"] * (1 + 1e-12) for lv in levels)
    res.check("p_n(1-r_n) <= 2*2^{-sqrt n} per level", mass_ok)
    res.note(f"truncation tail bound sum_{{n>{N}}} 2*2^{{-sqrt n}} = {tail:.6g}")
    _write_csv(out, "levels.csv", ("n", "r", "p", "eps", "mass", "mass_bound"),
               [(lv["n"], lv["r"], lv["p"], lv["eps"], lv["mass"], lv["mass_bound"]) for lv in levels], res)
    zeros = B.meta["zeros"]
    _write_csv(out, "zeros.csv", ("re", "im"), zip(zeros.real, zeros.imag), res)
    res.summary = {"N": N, "tested": count, "tail_bound": tail, "levels": levels}
    _write_json(out, "summary.json", res.summary, res)
    return res


def _bergman_zb(out, size, seed, psi_name, N=6):
    res = ExperimentResult("bergman-zB")
    psi = catalog(psi_name or "psi2")
    table = bergman.bergman_compact_ratio(construct("z_times_B", N=N), psi)
    if out is not None:
        table.to_csv(out / "ratio.csv")
        res.files.append(str(out / "ratio.csv"))
    mono = table.monotone(0.05)
    last = table.ratio[-1]
    res.check("ratio monotone (5% jitter) on every ray", bool(np.all(mono)),
              f"{int(np.sum(mono))}/{mono.size} rays")
    res.check(f"ratio < 0.3 at |a| = {table.radii[-1]:.6f} on every ray", bool(np.all(last < 0.3)),
              f"max={np.nanmax(last):.4f} min={np.nanmin(last):.4f}")
    ident = bergman.bergman_compact_ratio(construct("identity"), psi)
    dev = float(np.nanmax(np.abs(ident.ratio - 1)))
    res.check("identity ratio = 1", dev <= 1e-10, f"max deviation {dev:.1e}")
    res.summary = {"psi": psi.label, "N": N, "ray_max": table.ray_max, "eps_inf": table.eps_inf,
                   "monotone_rays": int(np.sum(mono)), "excluded": table.excluded}
    _write_json(out, "summary.json", res.summary, res)
    return res


def _suite_exemple(out, size, seed, psi_name):
    res = ExperimentResult("suite-exemple")
    psi = catalog(psi_name or "spliced-logsq")
    growth = {c: classify_growth(psi, c).verdict for c in ("delta1", "nabla0", "delta2")}
    res.check("Delta1 and nabla0 hold, Delta2 fails",
              growth["delta1"] == "holds-on-grid" and growth["nabla0"] == "holds-on-grid"
              and growth["delta2"] == "fails-on-grid", json.dumps(growth, sort_keys=True))
    rep = carleson.compactness_diagnostic(construct("phi2"), psi, size=min(size, 1 << 20))
    out_ok = rep.outcomes["R0"].holds is True and rep.outcomes["OB1"].holds is False
    res.check("phi2: R0 holds, OB1 fails", out_ok)
    res.check("no implication warnings", not rep.warnings, "; ".join(rep.warnings))
    res.note(rep.verdict)
    if out is not None:
        (out / "report.json").write_text(rep.to_json() + "\n")
        res.files.append(str(out / "report.json"))
        rep.profile.to_csv(out / "profile.csv")
        res.files.append(str(out / "profile.csv"))
    res.summary = {"growth": growth, "verdict": rep.verdict}
    return res


def _counterexample_2(out, size, seed, psi_name, N=10):
    res = ExperimentResult("counterexample-2")
    psi = catalog(psi_name or "psi2")
    mu = counterexample_2(psi, N)
    gap, a = mu.meta["gap"], mu.meta["a"]
    # mu(W(1, h)) with h = 1 - x_n, slightly enlarged because windows are open.
    rho = np.array([carleson.window_measure(mu, carleson.Window(1.0, float(h) * (1 + 1e-9)))
                    for h in gap])
    n = np.arange(1, N + 1)
    res.check("rho(1/Psi(2a_n)) >= n/Psi(2a_n)", bool(np.all(rho >= n * gap * (1 - 1e-12))),
              f"rho/h at n=N: {rho[-1] / gap[-1]:.3f}")
    g = psi.inverse_log1p(np.log1p(1.0 / (1 - mu.points.real)))
    norm = luxemburg_norm(g, mu, psi)
    res.check("||Psi^{-1}(1/(1-x))||_{L^Psi(mu)} <= 2", norm <= 2, f"norm={norm:.6f}")
    res.summary = {"psi": psi.label, "N": N, "a": a, "gap": gap, "rho_over_h": rho / gap, "norm_g": norm}
    if out is not None:
        mu.to_csv(out / "measure.csv")
        res.files.append(str(out / "measure.csv"))
    _write_json(out, "summary.json", res.summary, res)
    return res


def _counterexample_3(out, size, seed, psi_name):
    res = ExperimentResult("counterexample-3")
    ce = counterexample_3()
    psi, mu = ce.psi, ce.measure
    L = ce.atom_levels
    gaps = mu.meta["gap"]
    # K(h_n) >= mu([1 - t_n, 1]) / t_n with t_n = 1/Psi(y_n).
    masses = mu.weights
    ratio = np.array([np.sum(masses[m:]) / gaps[m] for m in range(L)])
    lower = ce.k_lower_bounds()
    h = 1.0 / psi.eval(ce.x[:L])
    prod = ratio * h * psi.eval(2.0 * psi.inverse(1.0 / h))
    res.check("K(h_n) h_n Psi(2 Psi^{-1}(1/h_n)) >= 1, so K0 fails at A=2",
              bool(np.all(prod >= 1 - 1e-12)), f"min product {prod.min():.4f}")
    res.check("mu(window)/t_n >= (1/h_n)/Psi(2 Psi^{-1}(1/h_n))", bool(np.all(ratio >= lower * (1 - 1e-12))))
    # Tail envelope: |f(r_n)| <= 4 y_n in the unit ball; beyond r_N the norm is <= 2^{-N+2}.
    tails = []
    for N in range(1, L):
        vals = 4.0 * ce.y[N:L]
        norm = luxemburg_norm(vals, masses[N:L], psi)
        tails.append((N, norm, 2.0 ** (-N + 2)))
    ok = all(nv <= bound * (1 + 1e-9) for _, nv, bound in tails)
    res.check("tail norm beyond r_N <= 2^{-N+2}", ok)
    res.note(f"representable atoms: {L} of {ce.levels} levels")
    res.summary = {"atoms": L, "levels": ce.levels, "K_ratio": ratio, "K_lower": lower,
                   "products": prod, "tail_norms": tails}
    if out is not None:
        mu.to_csv(out / "measure.csv")
        res.files.append(str(out / "measure.csv"))
    _write_json(out, "summary.json", res.summary, res)
    return res


EXPERIMENTS = {
    "meme-module": _meme_module,
    "lens": _lens,
    "psummming": _psummming,
    "blaschke": _blaschke,
    "bergman-zB": _bergman_zb,
    "suite-exemple": _suite_exemple,
    "counterexample-2": _counterexample_2,
    "counterexample-3": _counterexample_3,
}


def run_experiment(name: str, out=None, size: int = DEFAULT_SIZE, seed: int = 0,
                   psi: str | None = None) -> ExperimentResult:
    """Run a named experiment, writing files to ``out`` when given."""
    if name not in EXPERIMENTS:
        raise KeyError(name)
    out_path = None
    if out is not None:
        out_path = Path(out)
        out_path.mkdir(parents=True, exist_ok=True)
    return EXPERIMENTS[name](out_path, int(size), int(seed), psi)
