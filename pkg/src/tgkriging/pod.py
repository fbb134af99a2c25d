"""Nuisance-parameter laws and Monte Carlo probability-of-detection curves."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError
from .predict import predictive_mixture, safe_prob

log = logging.getLogger(__name__)

DEFAULT_GAMMAS = (0.95, 0.99)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("Uniform needs lo < hi")

    def cdf(self, x):
        return (x - self.lo) / (self.hi - self.lo)

    def ppf(self, u):
        return self.lo + u * (self.hi - self.lo)

    def in_support(self, x):
        return (x >= self.lo) & (x <= self.hi)


@dataclass(frozen=True)
class Normal:
    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise DomainError("Normal needs a positive variance")

    @property
    def sd(self):
        return float(np.sqrt(self.variance))

    def cdf(self, x):
        return ndtr((x - self.mean) / self.sd)

    def ppf(self, u):
        return self.mean + self.sd * ndtri(u)

    def in_support(self, x):
        return np.isfinite(x)


@dataclass(frozen=True)
class TruncatedNormalAtZero:
    """Normal(mean, variance) conditioned on being nonnegative."""

    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise DomainError("TruncatedNormalAtZero needs a positive variance")

    @property
    def sd(self):
        return float(np.sqrt(self.variance))

    @property
    def _lower(self):
        return ndtr(-self.mean / self.sd)

    def cdf(self, x):
        lo = self._lower
        return (ndtr((x - self.mean) / self.sd) - lo) / (1.0 - lo)

    def ppf(self, u):
        lo = self._lower
        return np.maximum(self.mean + self.sd * ndtri(lo + u * (1.0 - lo)), 0.0)

    def in_support(self, x):
        return (x >= 0) & np.isfinite(x)


MARGINALS = {"uniform": Uniform, "normal": Normal, "truncated_normal": TruncatedNormalAtZero}


def marginal_from_dict(spec):
    spec = dict(spec)
    kind = spec.pop("type", None)
    if kind not in MARGINALS:
        raise DomainError(f"unknown marginal type {kind!r}; expected one of {sorted(MARGINALS)}")
    return MARGINALS[kind](**{k: float(v) for k, v in spec.items()})


def marginal_to_dict(marginal):
    kind = {v: k for k, v in MARGINALS.items()}[type(marginal)]
    return {"type": kind, **marginal.__dict__}


def to_unit(marginal, value):
    """Probability integral transform of a physical value."""
    x = np.asarray(value, dtype=float)
    if not np.all(marginal.in_support(x)):
        raise DomainError(f"value outside the support of {marginal}")
    out = marginal.cdf(x)
    return out[()] if np.ndim(out) == 0 else out


def from_unit(marginal, u):
    """Quantile function; inverse of ``to_unit``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0) or np.any(u >= 1):
        raise DomainError("unit value must lie in (0, 1)")
    out = marginal.ppf(u)
    return out[()] if np.ndim(out) == 0 else out


@dataclass
class NuisanceDistribution:
    marginals: list

    @property
    def dim(self):
        return len(self.marginals)

    def to_unit(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.column_stack([to_unit(m, x[:, k]) for k, m in enumerate(self.marginals)])

    def from_unit(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        return np.column_stack([from_unit(m, u[:, k]) for k, m in enumerate(self.marginals)])


def sample_nuisance(dist, n, seed):
    """n i.i.d. points of the unit cube; in unit coordinates the law is uniform."""
    dim = dist.dim if isinstance(dist, NuisanceDistribution) else int(dist)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.random((n, dim))


def a_grid_for(step):
    if not 0 < step <= 1:
        raise DomainError("a_step must lie in (0, 1]")
    k = int(np.floor(1.0 / step + 1e-9))
    grid = np.round(step * np.arange(k + 1), 12)
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    return grid


@dataclass
class PodCurve:
    a_grid: np.ndarray
    pod_mean: np.ndarray
    pod_gamma: dict = field(default_factory=dict)
    n_mc: int = 0
    seed: int = 0


@dataclass
class FittedState:
    """A Trans-Gaussian model at fixed alpha with its theta draws."""

    model: object
    z: np.ndarray
    alpha: float
    draws: object


def _substream(seed, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _mc_points(a_grid, r, n_mc, seed, common_random_numbers):
    """Rows (a, x) for every grid value, n_mc nuisance draws each."""
    blocks = []
    for i, a in enumerate(a_grid):
        x = sample_nuisance(r - 1, n_mc, _substream(seed, 0 if common_random_numbers else i))
        blocks.append(np.column_stack([np.full(n_mc, a), x]))
    return np.vstack(blocks)


def _safe_matrix(state, pts, s, normal_approx=False):
    mix = predictive_mixture(state.z, state.alpha, state.draws, state.model, pts)
    return safe_prob(mix, s, normal_approx)


def _assemble(a_grid, safe, n_mc, gammas, seed):
    safe = safe.reshape(len(a_grid), n_mc)
    pod_gamma = {float(g): np.mean(safe >= g, axis=1) for g in sorted(gammas)}
    return PodCurve(np.asarray(a_grid), safe.mean(axis=1), pod_gamma, n_mc, seed)


def _check_gammas(gammas):
    gammas = tuple(float(g) for g in gammas)
    if any(not 0 < g < 1 for g in gammas):
        raise DomainError("safety levels must lie in (0, 1)")
    return gammas


def pod_curves(state, s, gammas=DEFAULT_GAMMAS, a_step=0.01, n_mc=1000, seed=0,
               common_random_numbers=False, normal_approx=False):
    """Mean POD and POD at each safety level on a grid of depths."""
    gammas = _check_gammas(gammas)
    a_grid = a_grid_for(a_step)
    pts = _mc_points(a_grid, state.model.r, n_mc, seed, common_random_numbers)
    safe = _safe_matrix(state, pts, s, normal_approx)
    return _assemble(a_grid, safe, n_mc, gammas, seed)


def alpha_weights(alphas, log_l_log, mass_cutoff=0.999):
    """Posterior weights of alpha under a uniform prior, cut to a mass window.

    Weights are normalized by the rectangle rule; the returned window is the
    shortest contiguous run of grid points holding at least ``mass_cutoff``.
    Returns (indices, weights renormalized on the window).
    """
    alphas = np.asarray(alphas, dtype=float)
    ll = np.asarray(log_l_log, dtype=float)
    ok = np.isfinite(ll)
    if not ok.any():
        raise DomainError("no alpha has a finite L^LOG")
    w = np.zeros_like(ll)
    w[ok] = np.exp(ll[ok] - ll[ok].max())
    if alphas.size > 1:
        widths = np.gradient(alphas) if alphas.size > 2 else np.full(alphas.size, np.diff(alphas)[0])
    else:
        widths = np.ones(1)
    w = w * widths
    w /= w.sum()
    cum = np.concatenate([[0.0], np.cumsum(w)])
    best = None
    for i in range(len(w)):
        j = np.searchsorted(cum, cum[i] + mass_cutoff - 1e-12, side="left")
        if j <= len(w):
            cand = (j - i, -(cum[j] - cum[i]), i, j)
            if best is None or cand < best:
                best = cand
    _, _, i, j = best
    idx = np.arange(i, j)
    ww = w[idx] / w[idx].sum()
    return idx, ww


def pod_integrated_alpha(profile, states, s, gammas=DEFAULT_GAMMAS, mass_cutoff=0.999,
                         a_step=0.01, n_mc=1000, seed=0, common_random_numbers=False,
                         normal_approx=False):
    """POD curves with alpha integrated out under a uniform prior.

    ``states`` maps an alpha grid value to its FittedState (or is a callable
    alpha -> FittedState). SAFE values are weight-averaged across alphas.
    """
    gammas = _check_gammas(gammas)
    idx, weights = alpha_weights(profile.alphas, profile.log_l_log, mass_cutoff)
    get = states if callable(states) else (lambda a: states[a])
    if len(idx) == 1:
        alpha = float(profile.alphas[idx[0]])
        log.warning("all posterior mass of alpha at %s; using the fixed-alpha curve", alpha)
        return pod_curves(get(alpha), s, gammas, a_step, n_mc, seed, common_random_numbers,
                          normal_approx)
    a_grid = a_grid_for(a_step)
    first = get(float(profile.alphas[idx[0]]))
    pts = _mc_points(a_grid, first.model.r, n_mc, seed, common_random_numbers)
    safe = np.zeros(len(pts))
    for k, wgt in zip(idx, weights):
        safe += wgt * _safe_matrix(get(float(profile.alphas[k])), pts, s, normal_approx)
    return _assemble(a_grid, safe, n_mc, gammas, seed)
