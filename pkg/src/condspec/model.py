"""
Physical parameters of the spin-1/2 neutral-particle model and their
reduction to the dimensionless operator

    L = -d^2/dxi^2 - (1/xi) d/dxi + gamma^2/xi^2 - a/xi + b xi + xi^2.

Units are hbar = c = 1. The couplings g, field norm and lambda enter only
through the product kappa = g * field_norm * lambda.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from . import frobenius
from .errors import AttractiveSingularity, InvalidRange

BRACKETS_PER_DECADE = 1024

log = logging.getLogger(__name__)


class SpinLabel(enum.IntEnum):
    UP = 1
    DOWN = -1


@dataclass(frozen=True)
class ReducedParams:
    """(gamma, a, b) of the reduced operator. Only |gamma| matters, so gamma >= 0."""

    gamma: float
    a: float
    b: float

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class PhysicalParams:
    """Model constants plus the quantum labels ``l`` and ``s``.

    ``field_norm`` is the field-strength constant that multiplies g and
    lambda; it is unrelated to the reduced coupling ``b``.
    """

    m: float
    omega: float
    g_factor: float = 1.0
    field_norm: float = 1.0
    lambda_c: float = 1.0
    a1: float = 0.0
    V0: float = 0.0
    l: int = 0
    s: int = 1

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"m must be > 0, got {self.m}")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if int(self.l) != self.l:
            raise ValueError(f"l must be an integer, got {self.l}")
        SpinLabel(self.s)

    @classmethod
    def from_kappa(cls, m, omega, kappa, **kw) -> "PhysicalParams":
        """Build parameters from the coupling product alone (g = kappa, field_norm = lambda = 1)."""
        return cls(m=m, omega=omega, g_factor=kappa, field_norm=1.0, lambda_c=1.0, **kw)

    @property
    def kappa(self) -> float:
        return self.g_factor * self.field_norm * self.lambda_c

    @property
    def a2(self) -> float:
        return self.m * self.omega**2

    @property
    def gamma_s(self) -> float:
        return self.l + (1 - self.s) / 2

    @property
    def delta_sq(self) -> float:
        return self.gamma_s**2 + 2 * self.m * self.a1

    @property
    def tau_s(self) -> float:
        k = self.kappa
        return self.s * k * self.gamma_s / (4 * self.m) + k / (8 * self.m)

    @property
    def alpha(self) -> float:
        return self.kappa * self.m


def reduce(p: PhysicalParams) -> ReducedParams:
    """Map the physical model onto (gamma, a, b).

    gamma = sqrt(gamma_s^2 + 2 m a1), a = tau_s / (2 m a2)^(1/4),
    b = alpha / (2 m a2)^(3/4).
    """
    if p.delta_sq < 0:
        raise AttractiveSingularity(
            f"gamma_s^2 + 2 m a1 = {p.delta_sq:g} < 0: inverse-square term too attractive"
        )
    scale = 2 * p.m * p.a2
    return ReducedParams(
        gamma=math.sqrt(p.delta_sq),
        a=p.tau_s / scale**0.25,
        b=p.alpha / scale**0.75,
    )


def energy_from_w(w: float, p: PhysicalParams) -> float:
    """Energy E for a reduced eigenvalue W: E = V0 + W sqrt(2 m a2) / (2 m)."""
    return p.V0 + w * math.sqrt(2 * p.m * p.a2) / (2 * p.m)


def w_from_energy(energy: float, p: PhysicalParams) -> float:
    zeta = 2 * p.m * (energy - p.V0)
    return zeta / math.sqrt(2 * p.m * p.a2)


def omega_residual(p: PhysicalParams, n: int, omega: float) -> float:
    """Truncation residual c_{n+1} of the model reduced at frequency ``omega``."""
    r = reduce(replace(p, omega=omega))
    return frobenius.truncation_residual(r.gamma, n, r.a, r.b)


def allowed_omega_scan(
    p: PhysicalParams,
    n: int,
    omega_range: tuple[float, float],
    resolution: int = BRACKETS_PER_DECADE,
) -> list[float]:
    """Frequencies in ``omega_range`` at which the degree-``n`` truncation holds.

    This reconstructs the "allowed frequency" condition: the omega field of
    ``p`` is ignored and swept over a log-spaced grid with ``resolution``
    brackets per decade; each sign change of the truncation residual is
    refined by bisection. Double roots (no sign change) are not reported,
    nor are stretches where the residual vanishes identically (the uncoupled
    model at even n truncates for every omega); the latter are logged.
    """
    lo, hi = omega_range
    if not (0 < lo < hi and math.isfinite(hi)):
        raise InvalidRange(f"omega range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    reduce(replace(p, omega=lo))  # surfaces AttractiveSingularity up front

    def f(w):
        return omega_residual(p, n, w)

    nbr = max(1, math.ceil(resolution * math.log10(hi / lo)))
    grid = np.geomspace(lo, hi, nbr + 1)
    vals = [f(w) for w in grid]
    padded = [0.0, *vals, 0.0]
    roots = []
    for k, (w0, f0) in enumerate(zip(grid, vals)):
        if f0 == 0.0:
            if padded[k] != 0.0 or padded[k + 2] != 0.0:
                roots.append(float(w0))
        elif k + 1 < len(vals) and f0 * vals[k + 1] < 0:
            roots.append(optimize.bisect(f, w0, grid[k + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400))
    if all(v == 0.0 for v in vals):
        log.warning("truncation residual vanishes identically on the omega grid; no isolated roots")
    return roots
