"""
Rayleigh-Ritz solution of the reduced radial problem.

Basis functions are u_j(xi) = xi^(gamma+j) exp(-beta xi^2 / 2), j = 0..N-1,
with inner product <f, g> = int_0^inf f g xi dxi. Every matrix element is a
Gaussian moment

    int_0^inf xi^k exp(-beta xi^2) dxi = Gamma((k+1)/2) / (2 beta^((k+1)/2)),

so assembly is exact. The Gram matrix of this basis is a Hankel moment
matrix whose condition number grows roughly like 10^(2.1 N), so the default
path factorizes it in extended precision (mpmath) and hands a well
conditioned symmetric matrix to LAPACK.

Because L = L0 - a/xi + b xi, the reduction to orthonormal coordinates is
done once per (gamma, N, beta) and cached; every subsequent (a, b) costs a
single small dense eigensolve.

Notes
-----
Three interchangeable routes produce the orthonormal frame:

``method="raw", precision="extended"``
    exact moments, Cholesky congruence in mpmath (default).
``method="raw", precision="double"``
    the same in float64; only usable for small N.
``method="orthogonal"``
    the same span expanded in polynomials orthonormal under
    xi^(2 gamma + 1) exp(-beta xi^2), with matrix elements from a Gauss rule
    for xi^(2 gamma) exp(-beta xi^2). Diagonal overlap; no large cancellations.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np
from scipy import linalg

from .errors import IllConditionedOverlap
from .model import ReducedParams

DEFAULT_SIZE = 40
ASYMMETRY_TOL = 1e-10
PRECISIONS = ("extended", "double")
METHODS = ("raw", "orthogonal")


@dataclass(frozen=True)
class BasisSpec:
    """N functions xi^(gamma+j) exp(-scale xi^2 / 2); scale = 1 is the plain Gaussian basis."""

    gamma: float
    size: int = DEFAULT_SIZE
    scale: float = 1.0

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if int(self.size) != self.size or self.size < 1:
            raise ValueError("size must be a positive integer")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")


@dataclass(frozen=True)
class MatrixPair:
    overlap: np.ndarray
    operator: np.ndarray


def working_dps(size: int) -> int:
    """Decimal digits used by the extended path for a basis of ``size`` functions."""
    return max(30, math.ceil(2.2 * size) + 30)


def gaussian_moment(k: float, scale: float = 1.0) -> float:
    """int_0^inf xi^k exp(-scale xi^2) dxi, for k > -1."""
    h = (k + 1) / 2
    return math.exp(math.lgamma(h) - h * math.log(scale)) / 2


def overlap_element(gamma: float, i: int, j: int, scale: float = 1.0) -> float:
    """<u_i, u_j> = Gamma(gamma + (i+j)/2 + 1) / (2 scale^(gamma + (i+j)/2 + 1))."""
    if i < 0 or j < 0:
        raise ValueError("basis indices must be >= 0")
    return gaussian_moment(2 * gamma + i + j + 1, scale)


def _blocks(gamma, size, scale, moment):
    """Overlap, a=b=0 operator, <xi> and <1/xi> matrices as nested lists.

    With p = gamma + j,
        L0 u_j = [(gamma^2 - p^2) xi^(p-2) + 2 beta (p+1) xi^p + (1 - beta^2) xi^(p+2)] e^(-beta xi^2/2).
    The xi^(p-2) coefficient vanishes for j = 0, which also keeps the
    divergent moment k = 2 gamma - 1 at gamma = 0 out of the sum.
    """
    beta = scale
    cache = {}

    def m(k):
        if k not in cache:
            cache[k] = moment(k)
        return cache[k]

    S, H0, X, Y = ([[None] * size for _ in range(size)] for _ in range(4))
    for i in range(size):
        for j in range(size):
            k = i + j  # moment order offset from 2 gamma
            p = gamma + j
            S[i][j] = m(k + 1)
            X[i][j] = m(k + 2)
            Y[i][j] = m(k)
            h = 2 * beta * (p + 1) * m(k + 1) + (1 - beta * beta) * m(k + 3)
            if j > 0:
                h += -j * (2 * gamma + j) * m(k - 1)
            H0[i][j] = h
    return S, H0, X, Y


def _asymmetry(h) -> float:
    n = len(h)
    return max(
        (abs(h[i][j] - h[j][i]) / (1 + abs(h[i][j])) for i in range(n) for j in range(i + 1, n)),
        default=0.0,
    )


def operator_matrix(params: ReducedParams, basis: BasisSpec, precision: str = "double") -> MatrixPair:
    """Overlap S and operator H = <u_i, L u_j> in the raw basis.

    Entries are exact Gamma-function moments; H is symmetrized after checking
    that its asymmetry is below ``ASYMMETRY_TOL``. With ``precision="extended"``
    entries are formed in mpmath before rounding to float64.
    """
    if not math.isclose(basis.gamma, params.gamma, rel_tol=0, abs_tol=1e-14):
        raise ValueError("basis.gamma must equal params.gamma")
    g, n, beta = params.gamma, basis.size, basis.scale
    if precision == "extended":
        with mpmath.workdps(working_dps(n)):
            gm, bm = mpmath.mpf(g), mpmath.mpf(beta)
            S, H0, X, Y = _blocks(gm, n, bm, lambda k: mpmath.gamma((2 * gm + k + 1) / 2) / (2 * bm ** ((2 * gm + k + 1) / 2)))
            a, b = mpmath.mpf(params.a), mpmath.mpf(params.b)
            H = [[H0[i][j] - a * Y[i][j] + b * X[i][j] for j in range(n)] for i in range(n)]
            asym = float(_asymmetry(H))
            S = np.array([[float(x) for x in row] for row in S])
            H = np.array([[float(x) for x in row] for row in H])
    elif precision == "double":
        S, H0, X, Y = (np.array(blk) for blk in _blocks(g, n, beta, lambda k: gaussian_moment(2 * g + k, beta)))
        H = H0 - params.a * Y + params.b * X
        asym = _asymmetry(H.tolist())
    else:
        raise ValueError(f"precision must be one of {PRECISIONS}")
    if asym >= ASYMMETRY_TOL:
        raise ArithmeticError(f"operator matrix asymmetry {asym:.3e} exceeds {ASYMMETRY_TOL:g}")
    return MatrixPair(overlap=S, operator=(H + H.T) / 2)


@dataclass(frozen=True)
class _Frame:
    """The basis span expressed in orthonormal coordinates."""

    kinetic: np.ndarray  # a = b = 0 operator
    xi: np.ndarray
    inv_xi: np.ndarray
    origin: np.ndarray  # coefficients of R(xi) / xi^gamma at xi = 0
    evaluate: Callable[[np.ndarray, float], float]
    to_raw: Callable[[np.ndarray], np.ndarray] | None
    overlap: np.ndarray | None = None  # only when not exactly the identity


def _check_asym(h):
    asym = float(_asymmetry(h))
    if asym >= ASYMMETRY_TOL:
        raise ArithmeticError(f"operator matrix asymmetry {asym:.3e} exceeds {ASYMMETRY_TOL:g}")


def _mp_lower_inverse(L, n):
    inv = mpmath.zeros(n, n)
    for j in range(n):
        inv[j, j] = 1 / L[j, j]
        for i in range(j + 1, n):
            acc = mpmath.mpf(0)
            for k in range(j, i):
                acc += L[i, k] * inv[k, j]
            inv[i, j] = -acc / L[i, i]
    return inv


def _mp_congruence(T, A, n):
    """T A T^T for lower-triangular T, as float64."""
    TA = T * A
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            acc = mpmath.fsum(TA[i, k] * T[j, k] for k in range(j + 1))
            out[i, j] = out[j, i] = float(acc)
    return out


def _raw_extended_frame(gamma, size, scale):
    dps = working_dps(size)
    for _ in range(4):
        with mpmath.workdps(dps):
            gm, bm = mpmath.mpf(gamma), mpmath.mpf(scale)

            def moment(k):
                h = (2 * gm + k + 1) / 2
                return mpmath.gamma(h) / (2 * bm**h)

            S, H0, X, Y = _blocks(gm, size, bm, moment)
            _check_asym(H0)
            Sm = mpmath.matrix(S)
            try:
                L = mpmath.cholesky(Sm)
            except ValueError:
                dps = int(dps * 1.5)
                continue
            pivot = min(L[k, k] ** 2 / Sm[k, k] for k in range(size))
            if pivot < mpmath.mpf(10) ** (20 - dps):
                dps = int(dps * 1.5)
                continue
            T = _mp_lower_inverse(L, size)
            kinetic = _mp_congruence(T, mpmath.matrix(H0), size)
            xi = _mp_congruence(T, mpmath.matrix(X), size)
            inv_xi = _mp_congruence(T, mpmath.matrix(Y), size)
            origin = np.array([float(T[k, 0]) for k in range(size)])
            TT = T.T
            break
    else:
        raise IllConditionedOverlap(
            f"overlap Cholesky failed for N={size} even at {dps} digits; reduce the basis size"
        )

    def to_raw(y):
        with mpmath.workdps(dps):
            v = TT * mpmath.matrix([mpmath.mpf(float(c)) for c in y])
            return [v[k] for k in range(size)]

    def evaluate(raw, x):
        with mpmath.workdps(dps):
            x = mpmath.mpf(x)
            acc = mpmath.fsum(c * x**j for j, c in enumerate(raw))
            return float(x**gm * mpmath.exp(-bm * x * x / 2) * acc)

    return _Frame(kinetic, xi, inv_xi, origin, evaluate, to_raw)


def _raw_double_frame(gamma, size, scale):
    S, H0, X, Y = (np.array(b) for b in _blocks(gamma, size, scale, lambda k: gaussian_moment(2 * gamma + k, scale)))
    _check_asym(H0.tolist())
    d = 1 / np.sqrt(np.diag(S))
    try:
        L = np.linalg.cholesky(S * np.outer(d, d))
    except np.linalg.LinAlgError as exc:
        raise IllConditionedOverlap(
            f"overlap Cholesky failed in double precision for N={size}; "
            "use extended precision or reduce the basis size"
        ) from exc
    if np.min(np.diag(L)) ** 2 < 1e3 * size * np.finfo(float).eps:
        raise IllConditionedOverlap(
            f"overlap matrix numerically singular in double precision for N={size}; "
            "use extended precision or reduce the basis size"
        )
    T = linalg.solve_triangular(L, np.eye(size), lower=True) * d  # T S T^T = I

    def cong(A):
        C = T @ A @ T.T
        return (C + C.T) / 2

    def evaluate(raw, x):
        powers = x ** (gamma + np.arange(size))
        return float(np.exp(-scale * x * x / 2) * (powers @ raw))

    return _Frame(cong(H0), cong(X), cong(Y), T[:, 0].copy(), evaluate, lambda y: T.T @ y)


def _jacobi_from_moments(moments, n):
    """Recurrence coefficients (alpha_0..alpha_{n-1}, e_0..e_{n-2}) of the
    orthonormal polynomials for a weight with the given mpmath moments.

    Cholesky of the (n+1) x (n+1) Hankel moment matrix (Golub-Welsch).
    """
    H = mpmath.matrix(n + 1, n + 1)
    for i in range(n + 1):
        for j in range(n + 1):
            H[i, j] = moments[i + j]
    R = mpmath.cholesky(H).T
    alpha, off = [], []
    for j in range(n):
        al = R[j, j + 1] / R[j, j]
        if j > 0:
            al -= R[j - 1, j] / R[j - 1, j - 1]
        alpha.append(float(al))
        if j < n - 1:
            off.append(float(R[j + 1, j + 1] / R[j, j]))
    return np.array(alpha), np.array(off)


def _orthonormal_values(alpha, off, mu0, x, n):
    """q_k, q_k', q_k'' (k < n) at points x for the orthonormal recurrence."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = np.zeros((n, x.size))
    d1 = np.zeros_like(q)
    d2 = np.zeros_like(q)
    q[0] = 1 / math.sqrt(mu0)
    for j in range(n - 1):
        t = x - alpha[j]
        nq = t * q[j]
        n1 = q[j] + t * d1[j]
        n2 = 2 * d1[j] + t * d2[j]
        if j > 0:
            nq -= off[j - 1] * q[j - 1]
            n1 -= off[j - 1] * d1[j - 1]
            n2 -= off[j - 1] * d2[j - 1]
        q[j + 1], d1[j + 1], d2[j + 1] = nq / off[j], n1 / off[j], n2 / off[j]
    return q, d1, d2


def _orthogonal_frame(gamma, size, scale):
    n, nodes_count = size, size + 2
    dps = working_dps(size)
    with mpmath.workdps(dps):
        gm, bm = mpmath.mpf(gamma), mpmath.mpf(scale)

        def moment(k):
            h = (k + 1) / 2
            return mpmath.gamma(h) / (2 * bm**h)

        try:
            mom1 = [moment(2 * gm + 1 + k) for k in range(2 * n + 1)]
            mom0 = [moment(2 * gm + k) for k in range(2 * nodes_count + 1)]
            a1, e1 = _jacobi_from_moments(mom1, n)
            a0, e0 = _jacobi_from_moments(mom0, nodes_count)
        except ValueError as exc:
            raise IllConditionedOverlap(f"moment matrix not positive definite at {dps} digits") from exc
        mu1, mu0 = float(mom1[0]), float(mom0[0])

    x = linalg.eigh_tridiagonal(a0, e0, eigvals_only=True)
    # Christoffel numbers; eigenvector components lose the tiny outer weights
    p0 = _orthonormal_values(a0, e0, mu0, x, nodes_count)[0]
    w = 1 / np.sum(p0 * p0, axis=0)
    q, d1, d2 = _orthonormal_values(a1, e1, mu1, x, n)
    beta = scale
    # xi * (L0 applied to xi^gamma e^{-beta xi^2/2} q) / (xi^gamma e^{-beta xi^2/2})
    Lq = x * (-d2 + 2 * beta * x * d1 + (2 * beta * (gamma + 1) + (1 - beta * beta) * x * x) * q) - (2 * gamma + 1) * d1
    S = (q * (w * x)) @ q.T
    K = (q * w) @ Lq.T
    _check_asym(K.tolist())
    X = (q * (w * x * x)) @ q.T
    Y = (q * w) @ q.T
    sym = lambda A: (A + A.T) / 2
    origin = _orthonormal_values(a1, e1, mu1, [0.0], n)[0][:, 0]

    def evaluate(coef, xv):
        vals = _orthonormal_values(a1, e1, mu1, [xv], n)[0][:, 0]
        return float(xv**gamma * math.exp(-beta * xv * xv / 2) * (vals @ coef))

    return _Frame(sym(K), sym(X), sym(Y), origin, evaluate, None, overlap=sym(S))


@functools.lru_cache(maxsize=64)
def _frame(gamma: float, size: int, scale: float, precision: str, method: str) -> _Frame:
    if method == "orthogonal":
        return _orthogonal_frame(gamma, size, scale)
    if method != "raw":
        raise ValueError(f"method must be one of {METHODS}")
    if precision == "extended":
        return _raw_extended_frame(gamma, size, scale)
    if precision == "double":
        return _raw_double_frame(gamma, size, scale)
    raise ValueError(f"precision must be one of {PRECISIONS}")


def clear_cache() -> None:
    _frame.cache_clear()


@dataclass
class SpectralResult:
    """Lowest Rayleigh-Ritz eigenvalues with their eigenvectors.

    ``coords`` holds each state in the orthonormal frame of the basis span
    (unit Euclidean norm, so int |R|^2 xi dxi = 1). ``vectors`` gives the
    same states as coefficients of the raw functions u_j (for the
    orthogonal method: of the orthonormal polynomials). The sign of each
    state is fixed so that R(xi) / xi^gamma > 0 at the origin.
    """

    params: ReducedParams
    basis: BasisSpec
    eigenvalues: np.ndarray
    coords: list[np.ndarray]
    converged_digits: float | None
    method: str = "raw"
    precision: str = "extended"
    _frame: _Frame = field(default=None, repr=False, compare=False)
    _raw: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def vectors(self) -> list[np.ndarray]:
        return [np.array([float(c) for c in self._raw_vector(nu)]) for nu in range(len(self.coords))]

    def _raw_vector(self, nu):
        if nu not in self._raw:
            to_raw = self._frame.to_raw
            self._raw[nu] = self.coords[nu] if to_raw is None else to_raw(self.coords[nu])
        return self._raw[nu]


def _solve(frame: _Frame, a: float, b: float, count: int):
    H = frame.kinetic - a * frame.inv_xi + b * frame.xi
    if frame.overlap is None:
        w, v = linalg.eigh(H, subset_by_index=(0, count - 1))
    else:
        w, v = linalg.eigh(H, frame.overlap, subset_by_index=(0, count - 1))
    coords = []
    for k in range(count):
        y = v[:, k]
        if frame.overlap is not None:
            y = y / math.sqrt(y @ frame.overlap @ y)
        if frame.origin @ y < 0:
            y = -y
        coords.append(y)
    return w, coords


def spectrum(
    params: ReducedParams,
    count: int = 5,
    basis: BasisSpec | None = None,
    precision: str = "extended",
    method: str = "raw",
    estimate_convergence: bool = True,
) -> SpectralResult:
    """Lowest ``count`` Rayleigh-Ritz eigenvalues of L for ``params``.

    The eigenvalues are upper bounds to the exact ones and decrease as the
    basis grows. ``converged_digits`` is -log10 of the largest relative
    change against a basis two functions smaller (None if that basis cannot
    hold ``count`` states).

    Raises
    ------
    IllConditionedOverlap
        If the overlap matrix cannot be factorized at the working precision.
    """
    if basis is None:
        basis = BasisSpec(params.gamma)
    if not math.isclose(basis.gamma, params.gamma, rel_tol=0, abs_tol=1e-14):
        raise ValueError("basis.gamma must equal params.gamma")
    if not 1 <= count <= basis.size:
        raise ValueError(f"count must be in [1, {basis.size}]")
    frame = _frame(float(basis.gamma), int(basis.size), float(basis.scale), precision, method)
    w, coords = _solve(frame, params.a, params.b, count)
    digits = None
    if estimate_convergence and basis.size - 2 >= count:
        small = _frame(float(basis.gamma), int(basis.size) - 2, float(basis.scale), precision, method)
        w2, _ = _solve(small, params.a, params.b, count)
        change = np.max(np.abs(w2 - w) / np.maximum(np.abs(w), 1.0))
        digits = float(-math.log10(change)) if change > 0 else float(np.finfo(float).precision)
    return SpectralResult(params, basis, w, coords, digits, method, precision, frame)


def expectation_xi(result: SpectralResult, nu: int) -> float:
    """<xi> in state ``nu``: v^T M v with M the moment matrix of xi."""
    y = result.coords[nu]
    return float(y @ result._frame.xi @ y)


def expectation_inv_xi(result: SpectralResult, nu: int) -> float:
    """<1/xi> in state ``nu``."""
    y = result.coords[nu]
    return float(y @ result._frame.inv_xi @ y)


def wavefunction_eval(result: SpectralResult, nu: int, xi: float) -> float:
    """R_nu(xi) for the normalized state ``nu``."""
    if xi < 0:
        raise ValueError("xi must be >= 0")
    return result._frame.evaluate(result._raw_vector(nu), xi)
