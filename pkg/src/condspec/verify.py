"""Regression and property checks behind ``condspec verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import frobenius, model, oracle, variational
from .model import ReducedParams

# reference truncation roots for gamma = 0, n = 2, b = 1
REFERENCE_N2_ROOTS = (-1.940551663, 1.190016441, 5.250535221)

# reference lowest eigenvalues; keys are the root index i of a^(2,i) at b = 1, or "off-curve" for a = 2, b = 1
REFERENCE_LISTS = {
    1: (5.750000000, 9.894040660, 14.06831985, 18.24977457),
    2: (-0.1664353619, 5.750000000, 10.52307155, 15.06421047),
    3: (-27.32460313, -0.5108147276, 5.750000000, 10.90599171),
    "off-curve": (-3.230518994, 4.510929109, 9.532275968, 14.19728140, 18.70978427),
}

CROSSCHECK_TRIPLES = (
    (0.0, 2.0, 1.0),
    (0.0, 0.0, 0.0),
    (0.5, -1.0, 2.0),
    (1.0, -1.0, 0.0),
    (2.5, 3.0, -1.0),
    (0.0, -2.5, 0.5),
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name, worst, tol, unit="max |err|"):
    return CheckResult(name, bool(worst < tol), f"{unit}={worst:.3e} tol={tol:g}")


def check_truncation_roots():
    sol = frobenius.truncation_a_roots(0.0, 2, 1.0)
    worst = max(abs(x - y) for x, y in zip(sol.a_roots, REFERENCE_N2_ROOTS))
    res = _result("truncation-roots-n2", worst, 1e-8)
    if sol.w != 5.75:
        res.passed = False
        res.detail += f" w={sol.w!r}"
    return res


def check_closed_form_n1():
    worst = 0.0
    for g in (0.0, 0.5, 1.0, 2.0):
        for b in np.linspace(-3, 3, 13):
            roots = frobenius.truncation_a_roots(g, 1, b).a_roots
            worst = max(worst, *(abs(x - y) for x, y in zip(roots, frobenius.closed_form_n1(g, b))))
    return _result("closed-form-n1", worst, 1e-12)


def reference_list_check(key) -> CheckResult:
    ref = REFERENCE_LISTS[key]
    if key == "off-curve":
        a, name = 2.0, "reference-list-off-curve"
    else:
        a, name = frobenius.truncation_a_roots(0.0, 2, 1.0).a_roots[key - 1], f"reference-list-a(2,{key})"
    w = variational.spectrum(ReducedParams(0.0, a, 1.0), len(ref), estimate_convergence=False).eigenvalues
    return _result(name, float(np.max(np.abs(w - np.array(ref)))), 1e-6)


def check_points_on_curves(n_max=8, b=1.0, gamma=0.0):
    worst = 0.0
    for n in range(1, n_max + 1):
        sol = frobenius.truncation_a_roots(gamma, n, b)
        for i, a in enumerate(sol.a_roots):
            w = variational.spectrum(ReducedParams(gamma, a, b), i + 1, estimate_convergence=False).eigenvalues[i]
            worst = max(worst, abs(w - sol.w))
    return _result("truncation-points-on-curves", worst, 1e-7)


def check_hellmann_feynman():
    worst, signs_ok = 0.0, True
    for g in (0.0, 1.0):
        for a in (-1.0, 0.0, 2.0):
            for b in (0.0, 1.0):
                p = ReducedParams(g, a, b)
                for nu in (0, 1):
                    worst = max(worst, *oracle.hf_residuals(p, nu))
                    res = variational.spectrum(p, nu + 1, estimate_convergence=False)
                    signs_ok &= variational.expectation_inv_xi(res, nu) > 0 and variational.expectation_xi(res, nu) > 0
    r = _result("hellmann-feynman-grid", worst, 1e-5)
    r.passed &= signs_ok
    return r


def check_asymptotes():
    e0 = oracle.asymptotic_check(0.0, 0, 20.0, 1.0)
    e1 = oracle.asymptotic_check(0.0, 1, 50.0, 1.0)
    return _result("hydrogenic-asymptote", max(e0, e1), 5e-3, "max |W/a^2 - limit|")


def check_crosscheck():
    worst = max(oracle.crosscheck(ReducedParams(*t), 4) for t in CROSSCHECK_TRIPLES)
    return _result("oracle-crosscheck", worst, 1e-6)


def check_exact_oscillator():
    worst = 0.0
    for g in (0.0, 0.5, 1.0):
        exact = 4 * np.arange(4) + 2 * g + 2
        p = ReducedParams(g, 0.0, 0.0)
        worst = max(
            worst,
            float(np.max(np.abs(variational.spectrum(p, 4, estimate_convergence=False).eigenvalues - exact))),
            float(np.max(np.abs(oracle.fd_spectrum(p, 4).richardson_estimate - exact))),
        )
    return _result("exact-oscillator", worst, 1e-7)


def check_sweep_consistency():
    from .cli import build_sweep, overlay_deviation

    table = build_sweep(0.0, 1.0, -2.0, 14.0, 33, nu_max=8, n_max=8)
    worst = overlay_deviation(table)
    r = _result("sweep-overlay-on-curves", worst, 1e-6)
    line = [w for n, _, _, w in table.overlay if n == 8]
    if any(w != 17.75 for w in line):
        r.passed = False
        r.detail += " n=8 overlay off the W=17.75 line"
    return r


def check_allowed_omega():
    p = model.PhysicalParams.from_kappa(1.0, 1.0, 8.0, l=0, s=1)
    roots = model.allowed_omega_scan(p, 1, (0.1, 10.0))
    ok = len(roots) == 1 and abs(roots[0] - 1.490) < 5e-4
    worst = max((abs(model.omega_residual(p, 1, w)) for w in roots), default=math.inf)
    ok &= worst < 1e-10
    for w in roots:
        red = model.reduce(replace(p, omega=1.05 * w))
        ev = variational.spectrum(red, 3, estimate_convergence=False).eigenvalues
        ok &= bool(np.all(np.diff(ev) > 0))
    return CheckResult("allowed-omega-demo", ok, f"roots={[round(w, 6) for w in roots]} residual={worst:.2e}")


def _reference(key):
    def check():
        return reference_list_check(key)

    check.__name__ = f"reference-list-{key}"
    return check


QUICK: list[Callable[[], CheckResult]] = [
    check_truncation_roots,
    _reference(1),
    _reference(2),
    _reference(3),
    _reference("off-curve"),
]

FULL: list[Callable[[], CheckResult]] = QUICK + [
    check_closed_form_n1,
    check_points_on_curves,
    check_hellmann_feynman,
    check_asymptotes,
    check_crosscheck,
    check_exact_oscillator,
    check_sweep_consistency,
    check_allowed_omega,
]


def run_checks(level: str = "quick") -> list[CheckResult]:
    checks = {"quick": QUICK, "full": FULL}[level]
    out = []
    for check in checks:
        try:
            out.append(check())
        except Exception as exc:  # a crashing check is a failing check
            name = getattr(check, "__name__", "check")
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out
