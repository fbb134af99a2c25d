import numpy as np
import pytest
from scipy import integrate

from tgkriging.design import DesignSet, Model, ProjectionPair, TrendBasis
from tgkriging.errors import DomainError, SingularPrior, Unreliable
from tgkriging.kernel import matern52
from tgkriging.likelihood import log_lik_tg_integrated
from tgkriging.posterior import (
    PROFILE, PosteriorTarget, fisher_info, log_jeffreys_prior, log_unnorm_posterior,
    map_search, map_theta, metropolis_within_gibbs, sample_theta,
)
from tgkriging.synthetic import gen_design


def test_fisher_zero_direction(rng):
    pts = rng.random((10, 2))
    pts[:, 1] = 0.5
    info = fisher_info(Model(DesignSet(pts)), [0.3, 0.4])
    assert np.all(info[1] == 0) and np.all(info[:, 1] == 0)
    with pytest.raises(SingularPrior):
        log_jeffreys_prior(Model(DesignSet(pts)), [0.3, 0.4])


def test_fisher_two_point_hand_derivation():
    delta, theta = 0.35, 0.6
    m = Model(DesignSet([[0.2], [0.2 + delta]]), TrendBasis("constant"))
    d = delta / theta
    rho = matern52(d)
    drho = (5 / 3) * (1 + np.sqrt(5) * d) * np.exp(-np.sqrt(5) * d) * delta ** 2 / theta ** 3
    q = -drho / (1 - rho)
    info = fisher_info(m, [theta])
    assert info.shape == (1, 1)
    assert info[0, 0] == pytest.approx(0.5 * q * q, rel=1e-12)
    assert log_jeffreys_prior(m, [theta]) == pytest.approx(0.5 * np.log(0.5 * q * q), rel=1e-12)


def test_fisher_symmetry_and_gauge(rng):
    m = Model(DesignSet(rng.random((20, 3))))
    theta = [0.3, 0.5, 0.8]
    info = fisher_info(m, theta)
    assert np.array_equal(info, info.T)
    assert np.linalg.eigvalsh(info)[0] > -1e-8
    q, _ = np.linalg.qr(rng.standard_normal((18, 18)))
    m.proj = ProjectionPair(m.proj.P, m.W @ q)
    assert np.allclose(fisher_info(m, theta), info, rtol=1e-8, atol=0)


def test_fisher_matches_trace_formula(rng):
    """Entry (i,j) = 0.5 tr(Q_i Q_j), Q_k = (W'SW)^-1 W' dS_k W, by dense algebra."""
    from tgkriging.kernel import corr_matrix, corr_matrix_grad

    pts = rng.random((9, 2))
    m = Model(DesignSet(pts))
    theta = [0.4, 0.7]
    w = m.W
    s = corr_matrix(pts, theta)
    a_inv = np.linalg.inv(w.T @ s @ w)
    qs = [a_inv @ w.T @ corr_matrix_grad(pts, theta, k) @ w for k in range(2)]
    ref = np.array([[0.5 * np.trace(qi @ qj) for qj in qs] for qi in qs])
    assert np.allclose(fisher_info(m, theta), ref, rtol=1e-10)
    ref_profile = ref - 0.5 * np.outer([np.trace(q) for q in qs], [np.trace(q) for q in qs]) / 7
    assert np.allclose(fisher_info(m, theta, kind=PROFILE), ref_profile, rtol=1e-9)


def test_jeffreys_two_path_determinant(rng):
    m = Model(DesignSet(rng.random((15, 3))))
    theta = [0.5, 0.3, 0.9]
    info = fisher_info(m, theta)
    via_chol = np.sum(np.log(np.diag(np.linalg.cholesky(info))))
    assert log_jeffreys_prior(m, theta) == pytest.approx(via_chol, abs=1e-9)


def test_posterior_definitional_sum(small_model, rng):
    m = small_model
    z = np.exp(rng.normal(1, 0.5, m.n))
    theta = [0.3, 0.4]
    lp = log_unnorm_posterior(z, theta, 0.4, m)
    assert lp == pytest.approx(
        log_lik_tg_integrated(z, theta, 0.4, m) + log_jeffreys_prior(m, theta), rel=1e-13)
    assert log_unnorm_posterior(z, theta, 0.4, m, prior="flat") == log_lik_tg_integrated(
        z, theta, 0.4, m)
    with pytest.raises(DomainError):
        log_unnorm_posterior(z, theta, 0.4, m, prior="uniform")


def test_posterior_grid_normalization(toy_1d):
    model, z = toy_1d
    target = PosteriorTarget(model, z, 0.0)
    theta = np.linspace(0.01, 3.0, 6001)
    lp = np.array([target.safe([t]) for t in theta])
    dens = np.exp(lp - lp.max())
    dens /= integrate.trapezoid(dens, theta)
    assert abs(integrate.simpson(dens, x=theta) - 1) < 1e-3


def test_map_matches_grid(toy_1d):
    model, z = toy_1d
    target = PosteriorTarget(model, z, 0.0)
    u = np.arange(np.log(0.02), np.log(3.0), 0.001)
    lp = np.array([target.safe(np.exp([x])) for x in u])
    u_grid = u[np.argmax(lp)]
    theta = map_theta(z, 0.0, model, n_starts=6, seed=1)
    assert abs(np.log(theta[0]) - u_grid) < 0.01


def test_map_is_a_mode(small_model, rng):
    m = small_model
    z = np.exp(rng.normal(1, 0.5, m.n) + 2 * m.points[:, 0])
    target = PosteriorTarget(m, z, 0.2)
    theta = map_theta(z, 0.2, m, n_starts=6, seed=0)
    best = target(theta)
    for _ in range(100):
        pert = theta * (1 + 1e-2 * rng.uniform(-1, 1, theta.size))
        assert target.safe(pert) <= best + 1e-9


def test_map_seed_consistency(small_model, rng):
    m = small_model
    z = np.exp(rng.normal(1, 0.5, m.n) + 2 * m.points[:, 0])
    target = PosteriorTarget(m, z, 0.2)
    a = map_search(target, 6, seed=0)
    b = map_search(target, 6, seed=99)
    assert a.reliable and b.reliable
    assert abs(a.log_post - b.log_post) < 1e-6


def test_map_degenerate_is_unreliable(rng):
    m = Model(DesignSet(rng.random((3, 2))))
    with pytest.raises(Unreliable):
        map_theta(np.exp(rng.normal(size=3)), 0.3, m, n_starts=4)
    with pytest.raises(DomainError):
        map_theta(np.exp(rng.normal(size=3)), 0.3, m, n_starts=3)


def test_sampler_schedule_and_determinism(toy_1d):
    model, z = toy_1d
    a = sample_theta(z, 0.0, model, 9000, 90, 1000, seed=11)
    assert a.draws.shape == (100, 1)
    assert a.m == 100
    assert np.all(a.draws > 0)
    b = sample_theta(z, 0.0, model, 9000, 90, 1000, seed=11)
    assert a.draws.tobytes() == b.draws.tobytes()
    assert np.array_equal(a.acceptance_rates, b.acceptance_rates)
    assert 0.1 <= a.acceptance_rates[0] <= 0.8
    with pytest.raises(DomainError):
        sample_theta(z, 0.0, model, 1000, 90, 10)


def test_sampler_warns_on_bad_acceptance(toy_1d):
    model, z = toy_1d
    draws = sample_theta(z, 0.0, model, 200, 2, 0, seed=1, step0=1e-4)
    assert draws.warnings and "outside" in draws.warnings[0]


def test_sampler_standard_normal_smoke():
    rng = np.random.default_rng(5)
    chain = metropolis_within_gibbs(lambda x: -0.5 * float(x @ x), [3.0], 100_000, 10, 2000,
                                    rng)
    x = chain.samples[:, 0]
    assert x.size == 10_000
    assert abs(x.mean()) < 0.05
    assert abs(x.var() - 1) < 0.1
    assert abs(chain.acceptance_rates[0] - 0.44) < 0.05


def test_sampler_two_dimensional_gaussian():
    rng = np.random.default_rng(6)
    cov = np.array([[1.0, 0.6], [0.6, 2.0]])
    prec = np.linalg.inv(cov)
    chain = metropolis_within_gibbs(lambda x: -0.5 * float(x @ prec @ x), [0.0, 0.0], 60_000,
                                    6, 2000, rng)
    assert np.allclose(np.cov(chain.samples.T), cov, atol=0.12)
