import numpy as np
import pytest

from tgkriging.alpha import (
    AlphaProfile, McmcConfig, alpha_profile, heuristic_gap, l_log, l_log_terms, l_map, seed_for,
)
from tgkriging.design import DesignSet, Model
from tgkriging.errors import DomainError, SamplerError
from tgkriging.likelihood import log_lik_tg_integrated
from tgkriging.posterior import PosteriorTarget, ThetaDraws, map_search, metropolis_within_gibbs, sample_theta

FAST = McmcConfig(n_iterations=300, thin=10, burn_in=100, n_starts=4)


def _data(rng, n=12):
    m = Model(DesignSet(rng.random((n, 2))))
    z = np.exp(rng.normal(0, 0.3, n) + 1.5 * m.points[:, 0] + 1.0)
    return m, z


def test_l_log_definitional(rng):
    m, z = _data(rng)
    theta = np.array([[0.3, 0.5]])
    assert l_log(z, 0.3, theta, m) == log_lik_tg_integrated(z, theta[0], 0.3, m)
    same = np.repeat(theta, 7, axis=0)
    assert l_log(z, 0.3, same, m) == pytest.approx(log_lik_tg_integrated(z, theta[0], 0.3, m),
                                                   rel=1e-14)
    with pytest.raises(DomainError):
        l_log(z, 0.3, np.empty((0, 2)), m)


def test_l_log_skip_policy(rng):
    m, z = _data(rng)
    good = np.array([[0.3, 0.4]] * 9)
    bad = np.array([[1e6, 1e6]])
    assert len(l_log_terms(z, 0.3, np.vstack([good, bad]), m)) == 9
    with pytest.raises(SamplerError):
        l_log(z, 0.3, np.vstack([good[:3], bad, bad]), m)


def test_l_log_monte_carlo_consistency(toy_1d):
    model, z = toy_1d
    small = sample_theta(z, 0.0, model, 1000, 10, 500, seed=1)
    big = sample_theta(z, 0.0, model, 100_000, 10, 500, seed=2)
    ts, tb = l_log_terms(z, 0.0, small, model), l_log_terms(z, 0.0, big, model)
    se = np.sqrt(ts.var(ddof=1) / ts.size + tb.var(ddof=1) / tb.size)
    assert abs(ts.mean() - tb.mean()) < 3 * se


def test_l_log_parametrization_invariance(toy_1d):
    """Chains run in theta and in log theta give the same L^LOG within 3 SE."""
    model, z = toy_1d
    target = PosteriorTarget(model, z, 0.0)
    log_chain = sample_theta(z, 0.0, model, 40_000, 10, 1000, seed=3)
    rng = np.random.default_rng(4)
    raw = metropolis_within_gibbs(
        lambda t: target.safe(t) if t[0] > 0 else -np.inf, [0.2], 40_000, 10, 1000, rng, 0.05
    )
    a = l_log_terms(z, 0.0, log_chain, model)
    b = l_log_terms(z, 0.0, raw.samples, model)
    se = np.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    assert abs(a.mean() - b.mean()) < 3 * se


def test_l_map(rng):
    m, z = _data(rng)
    val, theta = l_map(z, 0.3, m, n_starts=5, seed=0)
    assert val == log_lik_tg_integrated(z, theta, 0.3, m)
    val2, _ = l_map(z, 0.3, m, n_starts=5, seed=17)
    assert abs(val - val2) < 1e-6 or abs(
        map_search(PosteriorTarget(m, z, 0.3), 5, 0).log_post
        - map_search(PosteriorTarget(m, z, 0.3), 5, 17).log_post) < 1e-6


def test_l_map_degenerate(rng):
    m = Model(DesignSet(rng.random((3, 2))))
    assert l_map(np.exp(rng.normal(size=3)), 0.3, m, n_starts=4) == (None, None)


def test_heuristic_gap():
    a = np.linspace(0, 1, 11)
    ll = -((a - 0.4) ** 2)
    prof = AlphaProfile(a, ll, ll)
    assert heuristic_gap(prof) == (0.0, 0.0)
    prof = AlphaProfile(a, ll, ll + 1.5)
    mean, sd = heuristic_gap(prof, window=(0.2, 0.6))
    assert mean == pytest.approx(1.5) and sd == pytest.approx(0.0, abs=1e-12)
    lm = np.full(11, np.nan)
    lm[:4] = ll[:4]
    with pytest.raises(DomainError):
        heuristic_gap(AlphaProfile(a, ll, lm))


def test_profile_validation():
    with pytest.raises(DomainError):
        AlphaProfile([0.2, 0.1], [0, 0], [0, 0])
    prof = AlphaProfile([0.1, 0.2, 0.3], [-3.0, -1.0, np.nan], [np.nan, np.nan, np.nan])
    assert prof.argmax_log() == 0.2
    assert prof.argmax_map() is None


def test_alpha_profile_single_point(rng):
    m, z = _data(rng)
    prof = alpha_profile(z, [0.4], m, FAST)
    assert prof.alphas.tolist() == [0.4]
    assert prof.argmax_log() == 0.4
    assert isinstance(prof.draws[0], ThetaDraws) and prof.draws[0].m == 30


def test_alpha_profile_grid_checks(rng):
    m, z = _data(rng)
    with pytest.raises(DomainError):
        alpha_profile(z, [0.5, 0.3], m, FAST)
    with pytest.raises(DomainError):
        alpha_profile(z, [1.5], m, FAST)


def test_failed_alpha_is_absent(rng):
    m = Model(DesignSet(rng.random((8, 2))))
    prof = alpha_profile(np.ones(8), [0.1, 0.2], m, FAST)
    assert np.all(np.isnan(prof.log_l_log))
    assert prof.draws == [None, None]


def test_alpha_profile_deterministic(rng):
    m, z = _data(rng)
    a = alpha_profile(z, [0.2, 0.6], m, FAST)
    b = alpha_profile(z, [0.6], m, FAST)
    assert a.log_l_log[1] == b.log_l_log[0]
    assert seed_for(0, 0.6) != seed_for(0, 0.2) != seed_for(1, 0.2)


def test_mcmc_config_validation():
    with pytest.raises(DomainError):
        McmcConfig(n_iterations=100, thin=30)
    with pytest.raises(DomainError):
        McmcConfig(burn_in=-1)
