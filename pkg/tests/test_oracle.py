import math

import numpy as np
import pytest

from condspec import oracle, variational
from condspec.errors import DomainTooSmall
from condspec.model import ReducedParams
from condspec.oracle import GridSpec

OFF_CURVE_REFERENCE = [-3.230518994, 4.510929109, 9.532275968, 14.19728140, 18.70978427]


def test_grid_validation():
    assert GridSpec(10.0, 100).xi_min == pytest.approx(0.05)
    for bad in ((0.0, 100), (10.0, 10)):
        with pytest.raises(ValueError):
            GridSpec(*bad)
    with pytest.raises(ValueError):
        GridSpec(10.0, 100, 0)


def test_richardson_exact_on_quadratic_error():
    levels = [np.array([1 + 0.3 * h**2 + 0.05 * h**4]) for h in (1.0, 0.5, 0.25)]
    assert oracle.richardson(levels)[0] == pytest.approx(1.0, abs=1e-14)


def test_oscillator():
    res = oracle.fd_spectrum(ReducedParams(0, 0, 0), 3)
    np.testing.assert_allclose(res.richardson_estimate, [2, 6, 10], atol=1e-7)
    assert np.all(np.diff(res.eigenvalues) > 0)
    assert len(res.richardson_estimate) == len(res.eigenvalues)


def test_off_curve_values():
    res = oracle.fd_spectrum(ReducedParams(0, 2, 1), 5)
    np.testing.assert_allclose(res.richardson_estimate, OFF_CURVE_REFERENCE, atol=1e-6)


def test_coulomb_dominated_ground_state():
    res = oracle.fd_spectrum(ReducedParams(0, 20, 1), 1)
    assert abs(res.richardson_estimate[0] / 400 + 1) < 5e-3


@pytest.mark.parametrize("params", [ReducedParams(0, 2, 1), ReducedParams(0.5, -1, 2), ReducedParams(1, 3, 0)])
def test_second_order_convergence(params):
    res = oracle.fd_spectrum(params, 3, GridSpec(12.0, 250, 4))
    limit = res.richardson_estimate
    errs = [np.abs(level - limit) for level in res.levels[:3]]
    for coarse, fine in zip(errs, errs[1:]):
        ratio = coarse / fine
        assert np.all((ratio > 2) & (ratio < 8))


def test_explicit_small_domain_raises():
    with pytest.raises(DomainTooSmall):
        oracle.fd_spectrum(ReducedParams(0, 0, 0), 3, GridSpec(2.0, 200))


def test_automatic_domain_grows():
    res = oracle.fd_spectrum(ReducedParams(0, 0, 0), 6)
    np.testing.assert_allclose(res.richardson_estimate, 4 * np.arange(6) + 2, atol=1e-7)


def test_count_must_be_positive():
    with pytest.raises(ValueError):
        oracle.fd_spectrum(ReducedParams(0, 0, 0), 0)


@pytest.mark.parametrize("params", [ReducedParams(0, 0, 0), ReducedParams(0, 2, 1)])
def test_hf_residuals(params):
    assert max(oracle.hf_residuals(params, 0)) < 1e-5


@pytest.mark.parametrize("step", [0.0, -1e-4])
def test_hf_step_guard(step):
    with pytest.raises(ValueError, match="step"):
        oracle.hf_residuals(ReducedParams(0, 0, 0), 0, step)


@pytest.mark.parametrize("gamma,nu,a,b", [(0, 0, 20, 1), (0, 1, 50, 1), (1, 0, 50, 0)])
def test_asymptote(gamma, nu, a, b):
    assert oracle.asymptotic_check(gamma, nu, a, b) < 5e-3


def test_asymptote_needs_large_a():
    with pytest.raises(ValueError):
        oracle.asymptotic_check(0, 0, 5, 1)


def test_hydrogenic_limit():
    assert oracle.hydrogenic_limit(0, 1) == pytest.approx(-1 / 9)
    assert oracle.hydrogenic_limit(1, 0) == pytest.approx(-1 / 9)


@pytest.mark.parametrize(
    "params,count,tol",
    [(ReducedParams(0, 2, 1), 4, 1e-6), (ReducedParams(0, 0, 0), 3, 1e-7), (ReducedParams(0.5, -1, 2), 3, 1e-6)],
)
def test_crosscheck(params, count, tol):
    assert oracle.crosscheck(params, count) < tol


@pytest.mark.parametrize(
    "params", [ReducedParams(0, 2, 1), ReducedParams(0.5, -1, 2), ReducedParams(2.5, 3, -1), ReducedParams(1, -1, 0)]
)
def test_variational_bounds_oracle(params):
    var = variational.spectrum(params, 4, estimate_convergence=False).eigenvalues
    fd = oracle.fd_spectrum(params, 4).richardson_estimate
    assert np.all(var - fd > -1e-6)
    assert np.all(var - fd < 1e-5)


def test_bound_states_off_the_curves():
    params = ReducedParams(0, 2, 1)
    res = oracle.fd_spectrum(params, 5)
    _, vecs = oracle.level_eigen(params, 5, res.grid.xi_max, res.grid.points, vectors=True)
    for k in range(5):
        u = vecs[:, k]
        assert oracle.tail_ratio(u) < oracle.TAIL_TOL
        assert math.isclose(float(u @ u), 1.0, rel_tol=1e-12)
