"""Jeffreys-rule posterior over correlation lengths, its mode and an MCMC sampler.

The target stands in for the Gibbs reference posterior: it is the posterior
under the Jeffreys-rule prior |I(theta)|^(1/2) for the integrated likelihood.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.optimize import minimize

from .errors import DomainError, IllConditioned, SamplerError, SingularPrior, Unreliable
from .kernel import check_theta
from .likelihood import _log_l1, project
from .transform import transform_obs

log = logging.getLogger(__name__)

PROJECTED = "projected"
PROFILE = "profile"

JEFFREYS = "jeffreys"
FLAT = "flat"

# box for MAP starting points, unit-cube inputs
THETA_LO, THETA_HI = 0.05, 20.0


def _fisher_from(model, proj, kind=PROJECTED):
    """Fisher information from a factorization that carries gradients.

    Q_k = (W^T S W)^-1 W^T dS_k W and tr(Q_i Q_j) = tr(M dS_i M dS_j) with
    M = W (W^T S W)^-1 W^T = V^T V, V = L^-1 W^T. The ``profile`` variant
    subtracts tr(Q_i) tr(Q_j) / (n - p), the cross term that appears once the
    variance is also treated as unknown.
    """
    v = solve_triangular(proj.chol, model.W.T, lower=True, check_finite=False)
    m = v.T @ v
    mg = [m @ g for g in proj.grads]
    r = len(mg)
    info = np.empty((r, r))
    for i in range(r):
        for j in range(i, r):
            info[i, j] = info[j, i] = 0.5 * float(np.sum(mg[i] * mg[j].T))
    if kind == PROFILE:
        tr = np.array([np.trace(x) for x in mg])
        info -= 0.5 * np.outer(tr, tr) / (model.n - model.p)
    elif kind != PROJECTED:
        raise DomainError(f"unknown Fisher information variant {kind!r}")
    return info


def fisher_info(model, theta, jitter=0.0, kind=PROJECTED):
    """Fisher information of theta in the projected model W^T y."""
    return _fisher_from(model, project(model, theta, jitter, with_grads=True), kind)


def _log_jeffreys_from_info(info):
    eig = np.linalg.eigvalsh(info)
    if eig[0] <= 1e-12:
        raise SingularPrior(
            f"Fisher information is singular (smallest eigenvalue {eig[0]:.3g})"
        )
    return 0.5 * float(np.sum(np.log(eig)))


def log_jeffreys_prior(model, theta, jitter=0.0, kind=PROJECTED):
    """Unnormalized log Jeffreys-rule prior, 0.5 log |I(theta)|."""
    return _log_jeffreys_from_info(fisher_info(model, theta, jitter, kind))


@dataclass
class PosteriorTarget:
    """log pi(theta | z, alpha) up to a constant, for fixed data and alpha."""

    model: object
    z: np.ndarray
    alpha: float
    prior: str = JEFFREYS
    fisher: str = PROJECTED
    jitter: float = 0.0

    def __post_init__(self):
        self.y, self.log_jac = transform_obs(self.alpha, self.z)
        if self.prior not in (JEFFREYS, FLAT):
            raise DomainError(f"unknown prior {self.prior!r}")

    def log_lik(self, theta):
        proj = project(self.model, theta, self.jitter)
        return _log_l1(self.model, proj, self.y) + self.log_jac

    def __call__(self, theta):
        """Raises IllConditioned / SingularPrior where the density is undefined."""
        theta = check_theta(theta, self.model.r)
        if self.prior == FLAT:
            return self.log_lik(theta)
        proj = project(self.model, theta, self.jitter, with_grads=True)
        lp = _log_jeffreys_from_info(_fisher_from(self.model, proj, self.fisher))
        return _log_l1(self.model, proj, self.y) + self.log_jac + lp

    def safe(self, theta):
        """Like __call__ but -inf where the density cannot be evaluated."""
        try:
            val = self(theta)
        except (IllConditioned, SingularPrior, DomainError, FloatingPointError):
            return -np.inf
        return val if np.isfinite(val) else -np.inf


def log_unnorm_posterior(z, theta, alpha, model, prior=JEFFREYS, fisher=PROJECTED, jitter=0.0):
    return PosteriorTarget(model, z, alpha, prior, fisher, jitter)(theta)


def lhs_unit(n, d, rng, n_perm=50):
    """Latin hypercube in [0,1]^d; best of ``n_perm`` draws by maximin distance."""
    best, best_score = None, -np.inf
    for _ in range(max(1, n_perm)):
        cols = [(rng.permutation(n) + rng.random(n)) / n for _ in range(d)]
        x = np.column_stack(cols)
        if n > 1:
            diff = x[:, None, :] - x[None, :, :]
            dist = np.sqrt(np.sum(diff * diff, axis=-1))
            score = dist[np.triu_indices(n, 1)].min()
        else:
            score = 0.0
        if score > best_score:
            best, best_score = x, score
    return best


@dataclass
class MapResult:
    theta: np.ndarray
    log_post: float
    reliable: bool
    values: list


def map_search(target, n_starts=8, seed=0, tol=1e-4):
    """Multi-start Nelder-Mead in log theta. Never raises; see ``map_theta``."""
    if n_starts < 4:
        raise DomainError("n_starts must be at least 4")
    r = target.model.r
    rng = np.random.default_rng(seed)
    lo, hi = np.log(THETA_LO), np.log(THETA_HI)
    starts = lo + (hi - lo) * lhs_unit(n_starts, r, rng)

    def obj(u):
        if np.any(np.abs(u) > 30):
            return np.inf
        v = target.safe(np.exp(u))
        return -v if np.isfinite(v) else np.inf

    results = []
    for s in starts:
        if not np.isfinite(obj(s)):
            continue
        res = None
        x = s
        for _ in range(3):
            res = minimize(
                obj, x, method="Nelder-Mead",
                options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 2000 * r, "adaptive": r > 2},
            )
            if np.allclose(res.x, x, atol=1e-6):
                break
            x = res.x
        if np.isfinite(res.fun):
            results.append((float(res.fun), res.x))
    if not results:
        return MapResult(np.full(r, np.nan), -np.inf, False, [])
    results.sort(key=lambda t: t[0])
    values = [-f for f, _ in results]
    reliable = len(results) >= 2 and abs(results[0][0] - results[1][0]) <= tol
    return MapResult(np.exp(results[0][1]), values[0], reliable, values)


def map_theta(z, alpha, model, n_starts=8, seed=0, prior=JEFFREYS, fisher=PROJECTED, jitter=0.0):
    """Posterior mode of theta; raises Unreliable when starts disagree or all fail."""
    target = PosteriorTarget(model, z, alpha, prior, fisher, jitter)
    res = map_search(target, n_starts, seed)
    if not res.reliable:
        raise Unreliable(
            f"MAP search for alpha={alpha} did not converge consistently "
            f"(best values {res.values[:2]})"
        )
    return res.theta


@dataclass
class ChainResult:
    samples: np.ndarray
    acceptance_rates: np.ndarray
    steps: np.ndarray
    last: np.ndarray


def metropolis_within_gibbs(logpdf, x0, n_iterations, thin, burn_in, rng, step0=0.5,
                            target_rate=0.44, batch=50):
    """Component-wise random-walk Metropolis with burn-in step adaptation.

    Each sweep updates coordinates in order. During burn-in, after batch b the
    per-coordinate log step size moves by 2 (rate_b - target_rate) / sqrt(b);
    it is frozen afterwards. Every ``thin``-th post burn-in sweep is kept.
    """
    x = np.array(x0, dtype=float)
    d = x.size
    cur = logpdf(x)
    if not np.isfinite(cur):
        raise SamplerError("initial point has zero density")
    log_s = np.full(d, np.log(step0)) if np.isscalar(step0) else np.log(np.asarray(step0, float))
    batch_acc = np.zeros(d)
    n_batch = 0
    acc = np.zeros(d)
    keep = []
    for it in range(burn_in + n_iterations):
        steps = np.exp(log_s)
        eps = rng.standard_normal(d) * steps
        logu = np.log(rng.random(d))
        for k in range(d):
            prop = x.copy()
            prop[k] += eps[k]
            val = logpdf(prop)
            if val - cur >= logu[k]:
                x, cur = prop, val
                if it < burn_in:
                    batch_acc[k] += 1
                else:
                    acc[k] += 1
        if it < burn_in:
            if (it + 1) % batch == 0:
                n_batch += 1
                log_s += 2.0 * (batch_acc / batch - target_rate) / np.sqrt(n_batch)
                batch_acc[:] = 0
        elif (it - burn_in + 1) % thin == 0:
            keep.append(x.copy())
    rates = acc / max(n_iterations, 1)
    return ChainResult(np.array(keep).reshape(-1, d), rates, np.exp(log_s), x)


@dataclass
class ThetaDraws:
    alpha: float
    draws: np.ndarray
    n_iterations: int
    thin: int
    burn_in: int
    seed: int
    acceptance_rates: np.ndarray
    warnings: list = field(default_factory=list)

    @property
    def m(self):
        return self.draws.shape[0]


def initial_theta(target, seed=0, n_points=None):
    """Best point of a small Latin hypercube in log theta by posterior density."""
    r = target.model.r
    n_points = n_points or 4 * r + 4
    rng = np.random.default_rng([seed, 7])
    lo, hi = np.log(THETA_LO), np.log(2.0)
    cand = np.exp(lo + (hi - lo) * lhs_unit(n_points, r, rng, n_perm=10))
    vals = [target.safe(t) for t in cand]
    best = int(np.argmax(vals))
    if not np.isfinite(vals[best]):
        raise SamplerError("no valid starting point for the sampler")
    return cand[best]


def sample_theta(z, alpha, model, n_iterations=9000, thin=90, burn_in=1000, seed=0,
                 theta0=None, prior=JEFFREYS, fisher=PROJECTED, jitter=0.0, step0=0.5,
                 target=None):
    """Sample theta from the Jeffreys-rule posterior by Metropolis-within-Gibbs.

    The chain runs in log theta; the log-Jacobian sum(log theta) is added so
    the stationary law is the posterior on theta itself.
    """
    if n_iterations % thin:
        raise DomainError("n_iterations must be a multiple of thin")
    target = target or PosteriorTarget(model, z, alpha, prior, fisher, jitter)
    if theta0 is None:
        theta0 = initial_theta(target, seed)
    rng = np.random.default_rng(seed)

    def logpdf(u):
        if np.any(np.abs(u) > 30):
            return -np.inf
        return target.safe(np.exp(u)) + float(np.sum(u))

    chain = metropolis_within_gibbs(
        logpdf, np.log(check_theta(theta0, model.r)), n_iterations, thin, burn_in, rng, step0
    )
    if np.all(chain.acceptance_rates == 0):
        raise SamplerError(f"chain for alpha={alpha} rejected every proposal")
    warnings = []
    for k, rate in enumerate(chain.acceptance_rates):
        if not 0.1 <= rate <= 0.8:
            msg = f"acceptance rate {rate:.3f} for theta_{k + 1} outside [0.1, 0.8]"
            warnings.append(msg)
            log.warning("alpha=%s: %s", alpha, msg)
    return ThetaDraws(
        alpha=float(alpha), draws=np.exp(chain.samples), n_iterations=n_iterations,
        thin=thin, burn_in=burn_in, seed=int(seed),
        acceptance_rates=chain.acceptance_rates, warnings=warnings,
    )
