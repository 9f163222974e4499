"""
Finite-difference reference solver and analytic consistency checks.

The radial function is written R = xi^gamma phi(xi). Then phi is smooth at
the origin and obeys the self-adjoint problem

    -(p phi')' + p V phi = W p phi,   p = xi^(2 gamma + 1),
    V = -a/xi + b xi + xi^2,

which is discretized on cell centres xi_i = (i - 1/2) h with zero flux
through xi = 0 and phi = 0 one half-cell beyond xi_max. The scaled
unknown sqrt(p) phi = sqrt(xi) R turns the pencil into one symmetric
tridiagonal matrix. Eigenvalue errors are O(h^2) for every gamma >= 0, so
Romberg-style Richardson extrapolation over grid doublings applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import variational
from .errors import DomainTooSmall
from .model import ReducedParams

TAIL_TOL = 1e-8
MAX_DOMAIN_DOUBLINGS = 6


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``points`` cells on (0, xi_max), refined ``refinement_levels - 1`` times by doubling."""

    xi_max: float
    points: int = 1000
    refinement_levels: int = 3

    def __post_init__(self):
        if not self.xi_max > 0:
            raise ValueError("xi_max must be > 0")
        if self.points < 64:
            raise ValueError("points must be >= 64")
        if self.refinement_levels < 1:
            raise ValueError("refinement_levels must be >= 1")

    @property
    def xi_min(self) -> float:
        """First cell centre of the coarsest grid."""
        return self.xi_max / (2 * self.points)


@dataclass(frozen=True)
class OracleResult:
    """``eigenvalues`` from the finest grid, ``richardson_estimate`` their h -> 0 limit."""

    eigenvalues: np.ndarray
    richardson_estimate: np.ndarray
    grid: GridSpec
    levels: tuple[np.ndarray, ...] = ()


def _matrix(params: ReducedParams, xi_max: float, points: int):
    g, a, b = params.gamma, params.a, params.b
    h = xi_max / points
    faces = h * np.arange(1, points + 1)
    centres = faces - h / 2
    q = 2 * g + 1
    pf = faces**q
    pc = centres**q
    stiff = (pf + np.concatenate(([0.0], pf[:-1]))) / h**2
    diag = stiff / pc + (-a / centres + b * centres + centres**2)
    off = -pf[:-1] / (h**2 * np.sqrt(pc[:-1] * pc[1:]))
    return diag, off


def level_eigen(params: ReducedParams, count: int, xi_max: float, points: int, vectors: bool = False):
    """Lowest ``count`` eigenvalues on a single grid (and sqrt(xi) R on the cell centres)."""
    diag, off = _matrix(params, xi_max, points)
    return eigh_tridiagonal(diag, off, eigvals_only=not vectors, select="i", select_range=(0, count - 1))


def richardson(levels) -> np.ndarray:
    """Romberg table for errors in powers of h^2, grids halved at each level."""
    table = [np.asarray(v, dtype=float) for v in levels]
    k = 1
    while len(table) > 1:
        f = 4.0**k
        table = [(f * table[i + 1] - table[i]) / (f - 1) for i in range(len(table) - 1)]
        k += 1
    return table[0]


def tail_ratio(u: np.ndarray) -> float:
    """Largest |u| over the outer tenth of the grid, relative to max |u|."""
    n = len(u)
    return float(np.max(np.abs(u[-max(1, n // 10) :])) / np.max(np.abs(u)))


def fd_spectrum(params: ReducedParams, count: int, grid: GridSpec | None = None) -> OracleResult:
    """Lowest ``count`` eigenvalues by finite differences plus Richardson extrapolation.

    Without ``grid`` the domain is chosen from a coarse estimate of the
    highest requested eigenvalue and doubled until the eigenfunction tails
    fall below ``TAIL_TOL``. With an explicit grid, a tail above the
    tolerance raises DomainTooSmall.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if grid is not None:
        return _solve_on(params, count, grid)
    grid = GridSpec(default_xi_max(params, count))
    for _ in range(MAX_DOMAIN_DOUBLINGS):
        try:
            return _solve_on(params, count, grid)
        except DomainTooSmall:
            grid = GridSpec(2 * grid.xi_max, 2 * grid.points, grid.refinement_levels)
    return _solve_on(params, count, grid)


def default_xi_max(params: ReducedParams, count: int) -> float:
    """2 (sqrt(W_guess) + |b|/2 + 3), W_guess from a coarse run of this solver."""
    g, a, b = params.gamma, params.a, params.b
    rough = 4 * (count - 1) + 2 * g + 2 + b * b / 4 + abs(a)
    coarse_max = 2 * (math.sqrt(rough) + abs(b) / 2 + 3)
    w_guess = level_eigen(params, count, coarse_max, 400)[-1]
    return 2 * (math.sqrt(max(w_guess, 0.0)) + abs(b) / 2 + 3)


def _solve_on(params, count, grid: GridSpec) -> OracleResult:
    _, vecs = level_eigen(params, count, grid.xi_max, grid.points, vectors=True)
    ratio = max(tail_ratio(vecs[:, k]) for k in range(count))
    if ratio > TAIL_TOL:
        raise DomainTooSmall(
            f"eigenfunction tail {ratio:.2e} of its maximum at xi_max={grid.xi_max:g}; enlarge the domain"
        )
    levels = tuple(
        level_eigen(params, count, grid.xi_max, grid.points * 2**k) for k in range(grid.refinement_levels)
    )
    return OracleResult(levels[-1], richardson(levels), grid, levels)


def hf_residuals(
    params: ReducedParams,
    nu: int,
    step: float = 1e-4,
    basis: variational.BasisSpec | None = None,
) -> tuple[float, float]:
    """(|dW/da + <1/xi>|, |dW/db - <xi>|) for state ``nu``.

    Derivatives come from the four-point central difference
    (-W(x+2h) + 8 W(x+h) - 8 W(x-h) + W(x-2h)) / 12h over variational
    spectra; expectations from the variational eigenvector at ``params``.
    """
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    count = nu + 1

    def w(a, b):
        return variational.spectrum(
            ReducedParams(params.gamma, a, b), count, basis, estimate_convergence=False
        ).eigenvalues[nu]

    g, a, b = params.gamma, params.a, params.b
    dw_da = (-w(a + 2 * step, b) + 8 * w(a + step, b) - 8 * w(a - step, b) + w(a - 2 * step, b)) / (12 * step)
    dw_db = (-w(a, b + 2 * step) + 8 * w(a, b + step) - 8 * w(a, b - step) + w(a, b - 2 * step)) / (12 * step)
    res = variational.spectrum(params, count, basis, estimate_convergence=False)
    return (
        abs(dw_da + variational.expectation_inv_xi(res, nu)),
        abs(dw_db - variational.expectation_xi(res, nu)),
    )


def hydrogenic_limit(gamma: float, nu: int) -> float:
    """lim W / a^2 as a -> infinity."""
    return -1.0 / (2 * nu + 2 * gamma + 1) ** 2


def asymptotic_check(gamma: float, nu: int, a: float, b: float, points: int = 2000) -> float:
    """|W_nu(a, b) / a^2 - lim W / a^2| from the oracle on a Coulomb-scaled domain."""
    if a < 10:
        raise ValueError("asymptotic_check needs a >= 10")
    length = (2 * nu + 2 * gamma + 1) ** 2 / a
    grid = GridSpec(30 * length, points)
    params = ReducedParams(gamma, a, b)
    for _ in range(MAX_DOMAIN_DOUBLINGS):
        try:
            res = _solve_on(params, nu + 1, grid)
            break
        except DomainTooSmall:
            grid = GridSpec(2 * grid.xi_max, 2 * grid.points)
    else:
        res = _solve_on(params, nu + 1, grid)
    return abs(res.richardson_estimate[nu] / a**2 - hydrogenic_limit(gamma, nu))


def crosscheck(params: ReducedParams, count: int, basis: variational.BasisSpec | None = None) -> float:
    """Largest |variational - extrapolated oracle| over the lowest ``count`` states."""
    var = variational.spectrum(params, count, basis, estimate_convergence=False).eigenvalues
    fd = fd_spectrum(params, count).richardson_estimate
    return float(np.max(np.abs(var - fd)))
