"""
Power-series solutions of the reduced radial equation.

With R(xi) = xi^gamma exp(-b xi/2 - xi^2/2) P(xi) and P = sum_j c_j xi^j the
coefficients obey a three-term recurrence. Forcing

    W = (8 (gamma + n + 1) - b^2) / 4   and   c_{n+1} = 0

turns P into a polynomial of degree n. The second condition is a polynomial
of degree n + 1 in ``a`` (at fixed ``b``), whose n + 1 real roots are the
curves a^(n,i)(b), i = 1..n+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NotTruncated, RootCountMismatch

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class RecurrenceSeries:
    """Coefficients c_0..c_jmax of the series factor P(xi)."""

    gamma: float
    a: float
    b: float
    w: float
    coeffs: tuple[float, ...]

    @property
    def jmax(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class TruncationSolution:
    """Truncation eigenvalue and the n + 1 values of ``a`` that realize it."""

    gamma: float
    n: int
    b: float
    w: float
    a_roots: tuple[float, ...]


def _check_gamma(gamma: float) -> None:
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0 (only |gamma| enters), got {gamma}")


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer (truncation index starts at 1), got {n}")


def _step_factors(gamma, a, b, w, j):
    """Multipliers of c_{j+1} and c_j in the expression for c_{j+2}."""
    den = (j + 2) * (2 * gamma + j + 2)
    f1 = (b * (2 * gamma + 2 * j + 3) - 2 * a) / (2 * den)
    f0 = (4 * (2 * gamma + 2 * j - w + 2) - b * b) / (4 * den)
    return f1, f0


def recurrence_coefficients(gamma: float, a: float, b: float, w: float, jmax: int) -> RecurrenceSeries:
    """Run the three-term recurrence from c_{-1} = 0, c_0 = 1 up to c_jmax."""
    _check_gamma(gamma)
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    prev, cur = 0.0, 1.0
    coeffs = [1.0]
    for j in range(-1, jmax - 1):
        f1, f0 = _step_factors(gamma, a, b, w, j)
        prev, cur = cur, f1 * cur + f0 * prev
        coeffs.append(cur)
    return RecurrenceSeries(float(gamma), float(a), float(b), float(w), tuple(coeffs))


def truncation_w(gamma: float, n: int, b: float) -> float:
    """Eigenvalue forced by the truncation at degree ``n``."""
    _check_gamma(gamma)
    _check_n(n)
    return (8 * (gamma + n + 1) - b * b) / 4


def _residual_and_slopes(gamma, a, b, n):
    """c_{n+1} at W = truncation_w(gamma, n, b) with its derivatives in a and b.

    Forward-mode differentiation of the recurrence; W depends on b.
    """
    w = (8 * (gamma + n + 1) - b * b) / 4
    dw_db = -b / 2
    # (value, d/da, d/db) for c_{j} and c_{j+1}
    p, pa, pb = 0.0, 0.0, 0.0
    c, ca, cb = 1.0, 0.0, 0.0
    for j in range(-1, n):
        den = (j + 2) * (2 * gamma + j + 2)
        f1 = (b * (2 * gamma + 2 * j + 3) - 2 * a) / (2 * den)
        f1a = -1.0 / den
        f1b = (2 * gamma + 2 * j + 3) / (2 * den)
        f0 = (4 * (2 * gamma + 2 * j - w + 2) - b * b) / (4 * den)
        f0b = (-4 * dw_db - 2 * b) / (4 * den)
        nxt = f1 * c + f0 * p
        nxta = f1a * c + f1 * ca + f0 * pa
        nxtb = f1b * c + f1 * cb + f0b * p + f0 * pb
        p, pa, pb = c, ca, cb
        c, ca, cb = nxt, nxta, nxtb
    return c, ca, cb


def truncation_residual(gamma: float, n: int, a: float, b: float) -> float:
    """c_{n+1}(a, b) with W set to the truncation eigenvalue; zero on a truncation curve."""
    _check_gamma(gamma)
    _check_n(n)
    return _residual_and_slopes(gamma, a, b, n)[0]


def truncation_polynomial(gamma: float, n: int, b: float | None = None, a: float | None = None) -> np.ndarray:
    """Ascending coefficients of c_{n+1} as a polynomial in ``a`` (b given) or in ``b`` (a given)."""
    _check_gamma(gamma)
    _check_n(n)
    if (a is None) == (b is None):
        raise ValueError("give exactly one of a, b")
    if b is not None:
        av, bv = np.array([0.0, 1.0]), np.array([float(b)])
    else:
        av, bv = np.array([float(a)]), np.array([0.0, 1.0])
    # W(b) = (8(gamma+n+1) - b^2)/4, as a polynomial in the free variable
    w = npoly.polysub([2.0 * (gamma + n + 1)], npoly.polymul(bv, bv) / 4)
    prev, cur = np.zeros(1), np.ones(1)
    for j in range(-1, n):
        den = (j + 2) * (2 * gamma + j + 2)
        f1 = npoly.polysub(bv * (2 * gamma + 2 * j + 3), 2 * av) / (2 * den)
        f0 = npoly.polysub(npoly.polysub([4.0 * (2 * gamma + 2 * j + 2)], 4 * w), npoly.polymul(bv, bv)) / (4 * den)
        prev, cur = cur, npoly.polyadd(npoly.polymul(f1, cur), npoly.polymul(f0, prev))
    return npoly.polytrim(cur, 0.0)


def _polish(root, residual_slope, maxiter=50):
    x = float(root)
    for _ in range(maxiter):
        r, dr = residual_slope(x)
        if dr == 0.0:
            break
        step = r / dr
        x -= step
        if abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
    return x


def _real_candidates(coeffs: np.ndarray) -> list[float]:
    roots = npoly.polyroots(coeffs)
    keep = np.abs(roots.imag) < 1e-8 * (1 + np.abs(roots))
    return sorted(roots.real[keep])


def truncation_a_roots(gamma: float, n: int, b: float) -> TruncationSolution:
    """All n + 1 values of ``a`` on the truncation curves through ``b``, ascending.

    Companion-matrix eigenvalues of c_{n+1}(a), then Newton polish on the
    recurrence itself.
    """
    w = truncation_w(gamma, n, b)
    cands = _real_candidates(truncation_polynomial(gamma, n, b=b))

    def rs(x):
        c, ca, _ = _residual_and_slopes(gamma, x, b, n)
        return c, ca

    roots = sorted(_polish(x, rs) for x in cands)
    resid = [abs(rs(x)[0]) for x in roots]
    distinct = all(r2 > r1 for r1, r2 in zip(roots, roots[1:]))
    if len(roots) != n + 1 or not distinct or max(resid, default=0.0) >= RESIDUAL_TOL:
        raise RootCountMismatch(
            f"expected {n + 1} distinct real roots with |c_(n+1)| < {RESIDUAL_TOL:g} "
            f"(gamma={gamma}, n={n}, b={b}); got {roots} with residuals {resid}"
        )
    return TruncationSolution(float(gamma), int(n), float(b), w, tuple(roots))


def truncation_b_roots(gamma: float, n: int, a: float) -> list[float]:
    """Real values of ``b`` on the truncation curves through ``a``, ascending.

    W follows b through the truncation eigenvalue. The number of real roots
    is not fixed; whatever exists is returned.
    """
    _check_gamma(gamma)
    _check_n(n)
    cands = _real_candidates(truncation_polynomial(gamma, n, a=a))

    def rs(x):
        c, _, cb = _residual_and_slopes(gamma, a, x, n)
        return c, cb

    roots = sorted(_polish(x, rs) for x in cands)
    bad = [x for x in roots if abs(rs(x)[0]) >= RESIDUAL_TOL]
    if bad:
        raise RootCountMismatch(f"b roots {bad} failed to polish below {RESIDUAL_TOL:g} (gamma={gamma}, n={n}, a={a})")
    return roots


def closed_form_n1(gamma: float, b: float) -> tuple[float, float]:
    """The two n = 1 curves in closed form."""
    root = math.sqrt(b * b + 8 * (2 * gamma + 1))
    return ((2 * b * (gamma + 1) - root) / 2, (2 * b * (gamma + 1) + root) / 2)


def closed_form_b_n1(gamma: float, a: float) -> tuple[float, float]:
    """The n = 1 curves solved for ``b``."""
    g1, g3 = 2 * gamma + 1, 2 * gamma + 3
    root = math.sqrt(a * a + 2 * g3 * g1 * g1)
    return (2 * (2 * a * (gamma + 1) - root) / (g1 * g3), 2 * (2 * a * (gamma + 1) + root) / (g1 * g3))


def cubic_n2_residual(gamma: float, a: float, b: float) -> float:
    """Left side of the n = 2 cubic relating ``a`` and ``b``; zero on the curves."""
    g = gamma
    return (
        4 * a**3
        - 6 * a**2 * b * (2 * g + 3)
        + a * (b**2 * (12 * g**2 + 36 * g + 23) - 16 * (4 * g + 3))
        - b * (2 * g + 1) * (b**2 * (2 * g + 3) * (2 * g + 5) - 16 * (4 * g + 7)) / 2
    )


def polynomial_wavefunction(series: RecurrenceSeries, n: int, xi: float) -> float:
    """Evaluate xi^gamma exp(-b xi/2 - xi^2/2) P(xi) for a series that stops at degree ``n``.

    Raises NotTruncated if any stored coefficient beyond c_n is not negligible,
    or if the series is too short to tell.
    """
    _check_n(n)
    if series.jmax < n + 1:
        raise NotTruncated(f"series holds c_0..c_{series.jmax}; need c_{n + 1} to confirm termination")
    tail = max(abs(c) for c in series.coeffs[n + 1 :])
    if tail >= RESIDUAL_TOL:
        raise NotTruncated(f"max |c_j| for j > {n} is {tail:.3e}")
    if xi <= 0:
        raise ValueError("xi must be > 0")
    poly = npoly.polyval(xi, series.coeffs[: n + 1])
    return xi**series.gamma * math.exp(-series.b * xi / 2 - xi * xi / 2) * poly

