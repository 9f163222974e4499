"""Spectrum of a conditionally solvable radial operator.

Three routes to the eigenvalues of
    L = -d^2/dxi^2 - (1/xi) d/dxi + gamma^2/xi^2 - a/xi + b xi + xi^2:
polynomial (truncated-series) solutions, Rayleigh-Ritz in a Gaussian basis,
and a finite-difference oracle.
"""

from .errors import (
    AttractiveSingularity,
    CondSpecError,
    DomainTooSmall,
    IllConditionedOverlap,
    InvalidRange,
    NotTruncated,
    RootCountMismatch,
)
from .frobenius import (
    RecurrenceSeries,
    TruncationSolution,
    recurrence_coefficients,
    truncation_a_roots,
    truncation_b_roots,
    truncation_w,
)
from .model import PhysicalParams, ReducedParams, SpinLabel, energy_from_w, reduce
from .oracle import GridSpec, OracleResult, fd_spectrum
from .variational import BasisSpec, SpectralResult, spectrum

__version__ = "0.1.0"
