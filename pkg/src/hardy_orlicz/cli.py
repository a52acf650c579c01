"""Command-line front end.

Subcommands: ``classify``, ``norm``, ``carleson-profile``, ``diagnose`` and
``reproduce``.  Exit codes: 0 on success, 2 on a domain error, 3 on numeric
non-convergence and 64 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import carleson
from .bergman import AreaQuadrature
from .errors import ConvergenceError, DomainError
from .experiments import DEFAULT_SIZE, EXPERIMENTS, run_experiment
from .measures import BoundarySample, EmpiricalMeasure, luxemburg_norm
from .orlicz import CONDITIONS, catalog, catalog_names, classify_growth
from .symbols import TestFunction, boundary_trace, from_spec

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser, psi=True, symbol=False, psi_default="psi2"):
    if psi:
        p.add_argument("--psi", default=psi_default, help=f"Orlicz function: {', '.join(catalog_names())}")
    if symbol:
        p.add_argument("--symbol", default="phi2", help="symbol as JSON or short form, e.g. constant:0.5")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--size", type=int, default=None, help="boundary sample size (power of two)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardy-orlicz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="growth condition verdict")
    _common(p)
    p.add_argument("--condition", required=True, choices=CONDITIONS)
    p.add_argument("--witness", type=float, default=None)

    p = sub.add_parser("norm", help="Luxemburg norm of a function")
    _common(p)
    p.add_argument("--f", required=True,
                   help="const:C | u:A,R (test function u_{a,r}) | symbol:SPEC (|phi|) | csv:PATH")
    p.add_argument("--measure", default="haar", help="haar | area | csv:PATH (atoms re,im,weight)")

    p = sub.add_parser("carleson-profile", help="rho and K of a pullback measure")
    _common(p, psi=False, symbol=True)
    p.add_argument("--method", choices=("auto", "exact", "empirical"), default="auto")

    p = sub.add_parser("diagnose", help="all compactness conditions for C_phi on H^Psi")
    _common(p, symbol=True)

    p = sub.add_parser("reproduce", help="run a named experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    _common(p, psi_default=None)
    return parser


def _check_size(size):
    if size is None:
        return DEFAULT_SIZE
    if size < 2 or size & (size - 1):
        raise DomainError("--size must be a power of two >= 2")
    return size


def _parse_f(text: str):
    """Return a callable of ``z`` (or a fixed sample) from the ``--f`` grammar."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "const":
            c = complex(arg or "1")
            return lambda z: np.full(np.shape(z), abs(c))
        if kind == "u":
            a, r = (complex(v) for v in arg.split(","))
            u = TestFunction(complex(a), float(r.real))
            return lambda z: np.abs(u(z))
        if kind == "symbol":
            return from_spec(arg)
        if kind == "csv":
            return BoundarySample.from_csv(arg)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"bad --f value {text!r}: {exc}") from exc
    raise DomainError(f"unknown --f kind {kind!r}")


def _norm(args) -> tuple[float, str]:
    psi = catalog(args.psi)
    f = _parse_f(args.f)
    size = 1 << 16 if args.size is None else _check_size(args.size)
    if isinstance(f, BoundarySample):
        if args.measure != "haar":
            raise DomainError("a sampled boundary function needs --measure haar")
        return luxemburg_norm(np.abs(f.values), f, psi), "haar"
    if args.measure == "haar":
        if hasattr(f, "kind"):
            vals = np.abs(boundary_trace(f, size).values)
        else:
            vals = f(np.exp(2j * np.pi * np.arange(size) / size))
        return luxemburg_norm(vals, np.full(size, 1.0 / size), psi), "haar"
    if args.measure == "area":
        q = AreaQuadrature()
        vals = np.abs(f.eval(q.points)) if hasattr(f, "kind") else f(q.points)
        return luxemburg_norm(vals, q.weights, psi), "area"
    if args.measure.startswith("csv:"):
        mu = EmpiricalMeasure.from_csv(args.measure[4:])
        vals = np.abs(f.eval(mu.points)) if hasattr(f, "kind") else f(mu.points)
        return luxemburg_norm(vals, mu, psi), "csv"
    raise DomainError(f"unknown measure {args.measure!r}")


def _fmt(v: float) -> str:
    return f"{v:.6f}" if 1e-3 <= abs(v) < 1e6 else f"{v:.6e}"


def _emit(args, name: str, payload: dict) -> None:
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / name).write_text(json.dumps(carleson._jsonable(payload), sort_keys=True, indent=1) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return _dispatch(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


def _dispatch(args) -> int:
    if args.command == "classify":
        ev = classify_growth(catalog(args.psi), args.condition, witness=args.witness)
        payload = {**ev.to_dict(), "psi": args.psi}
        _emit(args, "classify.json", payload)
        print(json.dumps(carleson._jsonable(payload), sort_keys=True))
        return EXIT_OK

    if args.command == "norm":
        value, measure = _norm(args)
        payload = {"norm": value, "psi": args.psi, "f": args.f, "measure": measure}
        _emit(args, "norm.json", payload)
        print(_fmt(value))
        return EXIT_OK

    if args.command == "carleson-profile":
        phi = from_spec(args.symbol)
        prof = carleson.symbol_profile(phi, method=args.method, size=_check_size(args.size))
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            if args.format == "csv":
                prof.to_csv(args.out / "profile.csv")
            else:
                _emit(args, "profile.json", prof.to_dict())
        slope = prof.slope(max(prof.h.min(), 1e-4), min(prof.h.max(), 1e-2))
        print(f"{phi.kind}: {prof.method} profile, loglog slope on [1e-4, 1e-2] = {slope:.4f}, "
              f"K(h_max) = {prof.K[0]:.6g}")
        return EXIT_OK

    if args.command == "diagnose":
        phi = from_spec(args.symbol)
        size = min(_check_size(args.size), 1 << 20)
        rep = carleson.compactness_diagnostic(phi, catalog(args.psi), size=size)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "report.json").write_text(rep.to_json() + "\n")
            if args.format == "csv":
                rep.profile.to_csv(args.out / "profile.csv")
        print(rep.verdict)
        for w in rep.warnings:
            print(f"warning: {w}")
        return EXIT_OK

    if args.command == "reproduce":
        res = run_experiment(args.name, out=args.out, size=_check_size(args.size), seed=args.seed,
                             psi=args.psi)
        for line in res.verdicts:
            print(f"{res.name}: {line}")
        print(f"{res.name}: {'all checks ok' if res.passed else 'some checks FAILED'}")
        return EXIT_OK
    raise UsageError(f"unknown command {args.command}")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
