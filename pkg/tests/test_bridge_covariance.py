import numpy as np
import pytest
from scipy import stats

from solvheat.bridge import PathGrid, deterministic_path, sample_bridge
from solvheat.covariance import covariance_along_path
from solvheat.representation import rep_from_params


def test_bridge_endpoint_exact(rng):
    for target in (-1.3, 0.0, 2.0):
        path = sample_bridge(0.7, target, 64, rng)
        assert path.values[-1] == pytest.approx(target, abs=0.0)
        assert path.values[0] == 0.0


def test_bridge_reproducible():
    a = sample_bridge(1.0, 0.5, 32, np.random.default_rng(123))
    b = sample_bridge(1.0, 0.5, 32, np.random.default_rng(123))
    assert np.array_equal(a.values, b.values)


def test_bridge_midpoint_distribution():
    # for n = 2 and target 0, the midpoint is N(0, t/4)
    t = 0.8
    rng = np.random.default_rng(99)
    mids = np.array([sample_bridge(t, 0.0, 2, rng).values[1] for _ in range(10_000)])
    res = stats.kstest(mids / np.sqrt(t / 4.0), "norm")
    assert res.pvalue > 1e-3


def test_heisenberg_covariance_linear_path():
    # B(s) = s on [0, 1]: Sigma = [[1/3, 1/2], [1/2, 1]], det = 1/12
    rep = rep_from_params(0.0, 0.0)
    for n, tol in ((64, 2e-4), (4096, 5e-8)):
        path = deterministic_path(1.0, n, lambda s: s)
        cov = covariance_along_path(rep, 0.0, path)
        assert cov.sigma[0, 0] == pytest.approx(1.0 / 3.0, abs=tol)
        assert cov.sigma[0, 1] == pytest.approx(1.0 / 2.0, abs=tol)
        assert cov.sigma[1, 1] == pytest.approx(1.0, abs=1e-14)
        assert cov.det == pytest.approx(1.0 / 12.0, abs=3 * tol)


def test_zero_path_gives_rank_one_covariance(regime_params):
    # constant integrand: Sigma = t * ybar ybar^T, det = 0
    alpha, beta = regime_params
    rep = rep_from_params(alpha, beta)
    t = 0.6
    path = deterministic_path(t, 32, lambda s: 0.0)
    cov = covariance_along_path(rep, 0.0, path)
    assert np.allclose(cov.sigma, t * np.outer(rep.ybar, rep.ybar), atol=1e-12)
    assert cov.det == pytest.approx(0.0, abs=1e-12)


def test_closed_form_matches_generic_exponential(regime_params, rng):
    alpha, beta = regime_params
    rep = rep_from_params(alpha, beta)
    for _ in range(5):
        path = sample_bridge(0.9, float(rng.normal()), 128, rng)
        closed = covariance_along_path(rep, beta, path, method="closed")
        generic = covariance_along_path(rep, beta, path, method="exp2x2")
        via_expm = covariance_along_path(rep, beta, path, method="expm")
        scale = max(1.0, float(np.max(np.abs(closed.sigma))))
        assert np.max(np.abs(closed.sigma - generic.sigma)) <= 1e-10 * scale
        assert np.max(np.abs(closed.sigma - via_expm.sigma)) <= 1e-10 * scale


def test_covariance_is_psd(regime_params, rng):
    alpha, beta = regime_params
    rep = rep_from_params(alpha, beta)
    for _ in range(20):
        path = sample_bridge(0.7, float(rng.normal()), 64, rng)
        cov = covariance_along_path(rep, beta, path)
        eigs = np.linalg.eigvalsh(cov.sigma)
        assert eigs[0] >= -1e-12 * np.trace(cov.sigma)


def test_midpoint_quadrature_close_to_trapezoid(rng):
    rep = rep_from_params(1.0, 0.0)
    path = sample_bridge(0.5, 0.3, 512, rng)
    a = covariance_along_path(rep, 0.0, path, quadrature="trapezoid")
    b = covariance_along_path(rep, 0.0, path, quadrature="midpoint")
    assert np.allclose(a.sigma, b.sigma, rtol=1e-3, atol=1e-5)


def test_pathgrid_validation():
    with pytest.raises(ValueError):
        PathGrid(t=-1.0, n=4, values=np.zeros(5))
    with pytest.raises(ValueError):
        PathGrid(t=1.0, n=4, values=np.zeros(3))
