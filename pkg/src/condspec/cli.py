"""
Command-line front end.

Commands: truncate, spectrum, sweep, map, allowed-omega, verify.
Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import frobenius, model, variational, verify
from .errors import (
    AttractiveSingularity,
    DomainTooSmall,
    IllConditionedOverlap,
    InvalidRange,
    RootCountMismatch,
)
from .model import ReducedParams

log = logging.getLogger("condspec")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
NUMERIC_ERRORS = (RootCountMismatch, IllConditionedOverlap, AttractiveSingularity, DomainTooSmall, ArithmeticError)


def fmt(x: float) -> str:
    """12 significant digits, scientific notation."""
    return f"{x:.11e}"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class SweepTable:
    """Eigencurve samples ``rows`` (a, nu, w) and truncation ``overlay`` points (n, i, a_root, w)."""

    rows: list[tuple[float, int, float | None]] = field(default_factory=list)
    overlay: list[tuple[int, int, float, float]] = field(default_factory=list)
    failures: int = 0


def build_sweep(
    gamma: float,
    b: float,
    a_min: float,
    a_max: float,
    steps: int,
    nu_max: int,
    n_max: int,
    basis_size: int = variational.DEFAULT_SIZE,
) -> SweepTable:
    """Variational curves W_nu(a) at fixed b and the truncation points that sit on them.

    Overlay points inside [a_min, a_max] are added to the sampled abscissae
    so that every red point has an exact curve sample beneath it.
    """
    if not a_min < a_max:
        raise UsageError("a-min must be smaller than a-max")
    if steps < 2:
        raise UsageError("steps must be >= 2")
    table = SweepTable()
    for n in range(1, n_max + 1):
        try:
            sol = frobenius.truncation_a_roots(gamma, n, b)
        except RootCountMismatch as exc:
            log.warning("overlay n=%d skipped: %s", n, exc)
            table.failures += 1
            continue
        table.overlay.extend((n, i + 1, a, sol.w) for i, a in enumerate(sol.a_roots) if a_min <= a <= a_max)

    a_values = sorted(set(np.linspace(a_min, a_max, steps).tolist()) | {a for _, _, a, _ in table.overlay})
    basis = variational.BasisSpec(gamma, basis_size)
    per_a = {}
    for a in a_values:
        try:
            res = variational.spectrum(ReducedParams(gamma, a, b), nu_max + 1, basis, estimate_convergence=False)
            per_a[a] = res.eigenvalues
        except NUMERIC_ERRORS as exc:
            log.warning("solve failed at a=%g: %s", a, exc)
            table.failures += 1
            per_a[a] = None
    for nu in range(nu_max + 1):
        for a in a_values:
            w = per_a[a]
            table.rows.append((a, nu, None if w is None else float(w[nu])))
    return table


def overlay_deviation(table: SweepTable) -> float:
    """Largest distance between an overlay point and the curve nu = i - 1 interpolated at its abscissa."""
    worst = 0.0
    for n, i, a_root, w in table.overlay:
        pts = [(a, wv) for a, nu, wv in table.rows if nu == i - 1 and wv is not None]
        if not pts:
            continue
        xs, ys = zip(*pts)
        worst = max(worst, abs(float(np.interp(a_root, xs, ys)) - w))
    return worst


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json_number(x: float, as_string: bool):
    return repr(float(x)) if as_string else float(x)


# --- commands -----------------------------------------------------------------


def cmd_truncate(args) -> int:
    mode = args.mode or ("b-roots" if args.a is not None and args.b is None else "a-roots")
    if mode == "a-roots":
        if args.b is None:
            raise UsageError("a-roots mode needs --b")
        sol = frobenius.truncation_a_roots(args.gamma, args.n, args.b)
        rows = [(sol.n, i + 1, fmt(r), fmt(sol.w)) for i, r in enumerate(sol.a_roots)]
    else:
        if args.a is None:
            raise UsageError("b-roots mode needs --a")
        roots = frobenius.truncation_b_roots(args.gamma, args.n, args.a)
        rows = [(args.n, i + 1, fmt(r), fmt(frobenius.truncation_w(args.gamma, args.n, r))) for i, r in enumerate(roots)]
    _emit(_csv(["n", "i", "root", "w"], rows), args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    params = ReducedParams(args.gamma, args.a, args.b)
    basis = variational.BasisSpec(args.gamma, args.basis_size, args.scale)
    try:
        res = variational.spectrum(params, args.count, basis, precision=args.precision, method=args.route)
    except IllConditionedOverlap as exc:
        raise IllConditionedOverlap(f"{exc}. Hint: pass --precision extended or a smaller --basis-size") from exc
    as_str = args.precision == "extended"
    out = {
        "params": {"gamma": args.gamma, "a": args.a, "b": args.b},
        "eigenvalues": [_json_number(w, as_str) for w in res.eigenvalues],
        "converged_digits": res.converged_digits,
        "method": "rayleigh-ritz",
        "basis": {"size": basis.size, "scale": basis.scale, "route": args.route},
        "precision": args.precision,
    }
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    table = build_sweep(args.gamma, args.b, args.a_min, args.a_max, args.steps, args.nu_max, args.n_max, args.basis_size)
    curves = _csv(["a", "nu", "w"], [(fmt(a), nu, "" if w is None else fmt(w)) for a, nu, w in table.rows])
    overlay = _csv(["n", "i", "a_root", "w"], [(n, i, fmt(a), fmt(w)) for n, i, a, w in table.overlay])
    _emit(curves, args.curves)
    _emit(overlay, args.overlay)
    if table.failures:
        print(f"warning: {table.failures} point(s) failed", file=sys.stderr)
    return EXIT_OK


def _physical(args, omega=None) -> model.PhysicalParams:
    omega = args.omega if omega is None else omega
    if args.kappa is not None:
        if any(v is not None for v in (args.g_factor, args.field_norm, args.lambda_c)):
            raise UsageError("give either --kappa or the individual couplings, not both")
        return model.PhysicalParams.from_kappa(args.m, omega, args.kappa, a1=args.a1, V0=args.V0, l=args.l, s=args.s)
    return model.PhysicalParams(
        m=args.m,
        omega=omega,
        g_factor=1.0 if args.g_factor is None else args.g_factor,
        field_norm=1.0 if args.field_norm is None else args.field_norm,
        lambda_c=1.0 if args.lambda_c is None else args.lambda_c,
        a1=args.a1,
        V0=args.V0,
        l=args.l,
        s=args.s,
    )


def _reduced_dict(r: ReducedParams) -> dict:
    return {"gamma": r.gamma, "a": r.a, "b": r.b}


def cmd_map(args) -> int:
    p = _physical(args)
    r = model.reduce(p)
    out = _reduced_dict(r) | {
        "kappa": p.kappa,
        "a2": p.a2,
        "gamma_s": p.gamma_s,
        "delta_sq": p.delta_sq,
        "tau_s": p.tau_s,
        "alpha": p.alpha,
    }
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"--range must look like LO:HI, got {text!r}") from exc
    return lo, hi


def cmd_allowed_omega(args) -> int:
    lo, hi = _parse_range(args.range)
    p = _physical(args, omega=lo if lo > 0 else 1.0)
    roots = model.allowed_omega_scan(p, args.n, (lo, hi), args.resolution)
    entries = []
    for w in roots:
        at = replace(p, omega=w)
        red = model.reduce(at)
        w_trunc = frobenius.truncation_w(red.gamma, args.n, red.b)
        off = replace(p, omega=args.companion_factor * w)
        red_off = model.reduce(off)
        ev = variational.spectrum(red_off, args.companion_count, estimate_convergence=False).eigenvalues
        entries.append(
            {
                "omega": w,
                "residual": model.omega_residual(p, args.n, w),
                "reduced": _reduced_dict(red),
                "truncation_w": w_trunc,
                "energy": model.energy_from_w(w_trunc, at),
                "companion": {
                    "omega": off.omega,
                    "reduced": _reduced_dict(red_off),
                    "eigenvalues": [float(x) for x in ev],
                    "energies": [model.energy_from_w(float(x), off) for x in ev],
                },
            }
        )
    out = {"n": args.n, "range": [lo, hi], "roots": entries}
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks(args.level)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def _add_physical(p, with_omega=True):
    p.add_argument("--m", type=float, required=True, help="mass")
    if with_omega:
        p.add_argument("--omega", type=float, required=True, help="oscillator frequency")
    p.add_argument("--kappa", type=float, help="coupling product g * field_norm * lambda")
    p.add_argument("--g-factor", type=float)
    p.add_argument("--field-norm", type=float)
    p.add_argument("--lambda-c", type=float)
    p.add_argument("--a1", type=float, default=0.0, help="inverse-square potential strength")
    p.add_argument("--V0", type=float, default=0.0, help="potential offset")
    p.add_argument("--l", type=int, default=0, help="angular quantum number")
    p.add_argument("--s", type=int, choices=(1, -1), default=1, help="spin label")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condspec", description=__doc__.strip().splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("truncate", help="roots of the truncation condition")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--mode", choices=("a-roots", "b-roots"))
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser("spectrum", help="Rayleigh-Ritz eigenvalues")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--basis-size", type=int, default=variational.DEFAULT_SIZE)
    p.add_argument("--scale", type=float, default=1.0, help="Gaussian exponent of the basis")
    p.add_argument("--precision", choices=variational.PRECISIONS, default="extended")
    p.add_argument("--route", choices=variational.METHODS, default="raw", help="raw monomial basis or orthonormalized span")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="eigencurves W_nu(a) with truncation overlay")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=160)
    p.add_argument("--nu-max", type=int, default=8)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--basis-size", type=int, default=variational.DEFAULT_SIZE)
    p.add_argument("--curves", default="curves.csv")
    p.add_argument("--overlay", default="overlay.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("map", help="physical parameters to (gamma, a, b)")
    _add_physical(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("allowed-omega", help="frequencies satisfying the truncation condition")
    _add_physical(p, with_omega=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--range", required=True, help="LO:HI")
    p.add_argument("--resolution", type=int, default=model.BRACKETS_PER_DECADE, help="brackets per decade")
    p.add_argument("--companion-factor", type=float, default=1.05)
    p.add_argument("--companion-count", type=int, default=3)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_allowed_omega)

    p = sub.add_parser("verify", help="reference regressions and property checks")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidRange) as exc:
        print(f"condspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"condspec: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"condspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
