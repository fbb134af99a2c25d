"""Pseudo-likelihoods of the transformation parameter and the alpha scan."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IllConditioned, SamplerError, SingularPrior
from .likelihood import log_lik_tg_integrated
from .posterior import (
    FLAT, JEFFREYS, PROJECTED, PosteriorTarget, ThetaDraws, map_search, sample_theta,
)

log = logging.getLogger(__name__)

MAX_SKIP_FRACTION = 0.2


@dataclass
class McmcConfig:
    n_iterations: int = 9000
    thin: int = 90
    burn_in: int = 1000
    seed: int = 0
    n_starts: int = 8
    prior: str = JEFFREYS
    fisher: str = PROJECTED
    jitter: float = 0.0

    def __post_init__(self):
        for name in ("n_iterations", "thin", "n_starts"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")
        if self.burn_in < 0:
            raise DomainError("burn_in must be nonnegative")
        if self.n_iterations % self.thin:
            raise DomainError("n_iterations must be a multiple of thin")


def seed_for(seed, alpha):
    """Per-alpha seed, a pure function of the run seed and the alpha value."""
    ss = np.random.SeedSequence([int(seed), int(round(float(alpha) * 1_000_000))])
    return int(ss.generate_state(1, np.uint64)[0])


def l_log_terms(z, alpha, draws, model, jitter=0.0):
    """Per-draw log L1 values; ill-conditioned draws are dropped (at most 20%)."""
    thetas = draws.draws if isinstance(draws, ThetaDraws) else np.atleast_2d(draws)
    if thetas.shape[0] == 0:
        raise DomainError("no theta draws")
    vals = []
    skipped = 0
    for theta in thetas:
        try:
            vals.append(log_lik_tg_integrated(z, theta, alpha, model, jitter))
        except IllConditioned:
            skipped += 1
    if skipped:
        log.info("alpha=%s: skipped %d of %d ill-conditioned draws", alpha, skipped, len(thetas))
    if skipped > MAX_SKIP_FRACTION * len(thetas):
        raise SamplerError(
            f"{skipped} of {len(thetas)} draws are ill-conditioned (limit {MAX_SKIP_FRACTION:.0%})"
        )
    return np.array(vals)


def l_log(z, alpha, draws, model, jitter=0.0):
    """log L^LOG(z | alpha): posterior mean of log L1 over the theta draws."""
    return float(np.mean(l_log_terms(z, alpha, draws, model, jitter)))


def l_map(z, alpha, model, n_starts=8, seed=0, prior=JEFFREYS, fisher=PROJECTED, jitter=0.0):
    """log L^MAP(z | alpha) and the MAP itself, or (None, None) if unreliable."""
    target = PosteriorTarget(model, z, alpha, prior, fisher, jitter)
    res = map_search(target, n_starts, seed)
    if not res.reliable:
        return None, None
    try:
        return float(log_lik_tg_integrated(z, res.theta, alpha, model, jitter)), res.theta
    except (IllConditioned, DomainError):
        return None, None


@dataclass
class AlphaProfile:
    alphas: np.ndarray
    log_l_log: np.ndarray
    log_l_map: np.ndarray
    map_theta: list = field(default_factory=list)
    draws: list = field(default_factory=list)
    log_l_log_se: np.ndarray | None = None

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=float)
        self.log_l_log = np.asarray(self.log_l_log, dtype=float)
        self.log_l_map = np.asarray(self.log_l_map, dtype=float)
        if self.alphas.size > 1 and np.any(np.diff(self.alphas) <= 0):
            raise DomainError("alpha grid must be strictly increasing")

    def argmax_log(self):
        ok = np.isfinite(self.log_l_log)
        if not ok.any():
            raise DomainError("no alpha has a finite L^LOG")
        return float(self.alphas[ok][np.argmax(self.log_l_log[ok])])

    def argmax_map(self):
        ok = np.isfinite(self.log_l_map)
        if not ok.any():
            return None
        return float(self.alphas[ok][np.argmax(self.log_l_map[ok])])

    def draws_for(self, alpha):
        i = int(np.argmin(np.abs(self.alphas - alpha)))
        if abs(self.alphas[i] - alpha) > 1e-9:
            raise KeyError(alpha)
        return self.draws[i]


def heuristic_gap(profile, window=None, min_points=5):
    """Mean and standard deviation of log L^MAP - log L^LOG over ``window``.

    Under the asymptotic and Jeffreys approximations the gap is r/2.
    """
    a = profile.alphas
    mask = np.isfinite(profile.log_l_map) & np.isfinite(profile.log_l_log)
    if window is not None:
        mask &= (a >= window[0] - 1e-12) & (a <= window[1] + 1e-12)
    if mask.sum() < min_points:
        raise DomainError(
            f"heuristic gap needs {min_points} alphas with both pseudo-likelihoods, "
            f"got {int(mask.sum())}"
        )
    gap = profile.log_l_map[mask] - profile.log_l_log[mask]
    return float(gap.mean()), float(gap.std(ddof=1))


@dataclass
class AlphaFit:
    alpha: float
    log_l_log: float
    log_l_log_se: float
    log_l_map: float
    map_theta: np.ndarray | None
    draws: ThetaDraws | None
    error: str | None = None


def fit_alpha(z, alpha, model, cfg):
    """MAP, theta draws and both pseudo-likelihoods for one alpha; never raises."""
    seed = seed_for(cfg.seed, alpha)
    try:
        lmap, theta_map = l_map(z, alpha, model, cfg.n_starts, seed, cfg.prior, cfg.fisher,
                                cfg.jitter)
        draws = sample_theta(
            z, alpha, model, cfg.n_iterations, cfg.thin, cfg.burn_in, seed,
            theta0=theta_map, prior=cfg.prior, fisher=cfg.fisher, jitter=cfg.jitter,
        )
        terms = l_log_terms(z, alpha, draws, model, cfg.jitter)
    except (SamplerError, IllConditioned, SingularPrior, DomainError) as exc:
        log.warning("alpha=%s failed: %s", alpha, exc)
        return AlphaFit(float(alpha), np.nan, np.nan, np.nan, None, None, str(exc))
    se = float(terms.std(ddof=1) / np.sqrt(terms.size)) if terms.size > 1 else np.nan
    return AlphaFit(
        float(alpha), float(terms.mean()), se,
        np.nan if lmap is None else lmap, theta_map, draws,
    )


def _fit_alpha_args(args):
    return fit_alpha(*args)


def alpha_profile(z, alpha_grid, model, cfg=None, threads=1, on_result=None):
    """Scan the alpha grid; failed alphas are recorded as absent, not fatal.

    ``on_result`` is called with each AlphaFit in grid order as it completes.
    """
    cfg = cfg or McmcConfig()
    grid = np.asarray(alpha_grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0) or np.any(grid > 1):
        raise DomainError("alpha grid must be nonempty and lie in [0, 1]")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise DomainError("alpha grid must be strictly increasing")
    jobs = [(z, a, model, cfg) for a in grid]
    if threads == 1:
        fits = []
        for job in jobs:
            fits.append(_fit_alpha_args(job))
            if on_result:
                on_result(fits[-1])
    else:
        with ProcessPoolExecutor(max_workers=threads or None) as pool:
            fits = []
            for fit in pool.map(_fit_alpha_args, jobs):
                fits.append(fit)
                if on_result:
                    on_result(fit)
    return AlphaProfile(
        alphas=grid,
        log_l_log=[f.log_l_log for f in fits],
        log_l_map=[f.log_l_map for f in fits],
        map_theta=[f.map_theta for f in fits],
        draws=[f.draws for f in fits],
        log_l_log_se=np.array([f.log_l_log_se for f in fits]),
    )
