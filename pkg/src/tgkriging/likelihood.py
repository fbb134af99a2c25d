"""Gaussian and Trans-Gaussian likelihood surfaces.

Everything is computed in log space. The integrated likelihood L1 removes the
trend coefficients and the variance under the prior 1/sigma^2 and depends on
the data only through W^T y, where the columns of W span the orthogonal
complement of the trend space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular
from scipy.special import gammaln

from .errors import DomainError, IllConditioned
from .kernel import check_theta, corr_and_grads, corr_from_sqdiff
from .transform import transform_obs

LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class GaussianHyper:
    beta: np.ndarray
    sigma2: float

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2!r}")


def cholesky(a, what="matrix"):
    """Lower Cholesky factor; raises IllConditioned carrying the failing pivot."""
    c, info = lapack.dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info != 0:
        pivot = float(c[info - 1, info - 1]) if info > 0 else None
        raise IllConditioned(
            f"Cholesky of {what} failed at pivot {info} (value {pivot})", min_pivot=pivot
        )
    return c


def logdet_chol(c):
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def correlation(model, theta, jitter=0.0):
    theta = check_theta(theta, model.r)
    sigma = corr_from_sqdiff(model.sqd, theta)
    np.fill_diagonal(sigma, 1.0 + jitter)
    return sigma


@dataclass
class Projected:
    """Cholesky factor of W^T Sigma W for one theta, plus optional gradients."""

    chol: np.ndarray
    logdet: float
    sigma: np.ndarray
    grads: np.ndarray | None = None


def project(model, theta, jitter=0.0, with_grads=False):
    theta = check_theta(theta, model.r)
    if with_grads:
        sigma, grads = corr_and_grads(model.sqd, theta)
    else:
        sigma, grads = corr_from_sqdiff(model.sqd, theta), None
    np.fill_diagonal(sigma, 1.0 + jitter)
    w = model.W
    a = w.T @ sigma @ w
    a = 0.5 * (a + a.T)
    c = cholesky(a, "W^T Sigma W")
    return Projected(c, logdet_chol(c), sigma, grads)


def integrated_constant(n, p):
    """log of the printed normalizer (2 pi^((n-p)/2) / Gamma((n-p)/2))^-1.

    Direct integration of the Gaussian likelihood against 1/sigma^2 gives
    pi^(-(n-p)/2) Gamma((n-p)/2) |H^T H|^(-1/2) instead, i.e. the printed one
    times 2 |H^T H|^(-1/2). The two differ by a factor that depends on neither
    theta, alpha nor the data, so maxima and posteriors are unaffected.
    """
    k = n - p
    return -np.log(2.0) - 0.5 * k * np.log(np.pi) + gammaln(0.5 * k)


def exact_integrated_constant(h):
    """log of the normalizer obtained by integrating beta and sigma^2 out."""
    n, p = h.shape
    k = n - p
    sign, logdet_hth = np.linalg.slogdet(h.T @ h)
    return -0.5 * k * np.log(np.pi) + gammaln(0.5 * k) - 0.5 * logdet_hth


def _qform(proj, wty):
    v = solve_triangular(proj.chol, wty, lower=True, check_finite=False)
    return float(v @ v)


def _log_l1(model, proj, y):
    n, p = model.n, model.p
    q = _qform(proj, model.W.T @ y)
    if not q > 1e-300 or not np.isfinite(q):
        raise DomainError(
            f"projected quadratic form y^T W (W^T S W)^-1 W^T y = {q!r} is not positive"
        )
    return integrated_constant(n, p) - 0.5 * proj.logdet - 0.5 * (n - p) * np.log(q)


def log_lik_full(y, hyper, theta, model, jitter=0.0):
    """log L(y | beta, sigma2, theta) for the Gaussian universal Kriging model."""
    y = np.asarray(y, dtype=float)
    sigma = correlation(model, theta, jitter)
    c = cholesky(sigma, "Sigma_theta")
    resid = y - model.H @ hyper.beta
    v = solve_triangular(c, resid, lower=True, check_finite=False)
    n = model.n
    return (
        -0.5 * n * (LOG_2PI + np.log(hyper.sigma2))
        - 0.5 * logdet_chol(c)
        - 0.5 * float(v @ v) / hyper.sigma2
    )


def log_lik_integrated(y, theta, model, jitter=0.0):
    """log L1(y | theta); beta and sigma^2 integrated out against 1/sigma^2.

    The constant term is the printed one; see ``integrated_constant``.
    """
    y = np.asarray(y, dtype=float)
    return _log_l1(model, project(model, theta, jitter), y)


def log_lik_tg(z, hyper, theta, alpha, model, jitter=0.0):
    y, log_jac = transform_obs(alpha, z)
    return log_lik_full(y, hyper, theta, model, jitter) + log_jac


def log_lik_tg_integrated(z, theta, alpha, model, jitter=0.0):
    y, log_jac = transform_obs(alpha, z)
    return log_lik_integrated(y, theta, model, jitter) + log_jac


def quad_form(y, theta, model, jitter=0.0):
    """y^T W (W^T Sigma W)^-1 W^T y."""
    return _qform(project(model, theta, jitter), model.W.T @ np.asarray(y, dtype=float))
