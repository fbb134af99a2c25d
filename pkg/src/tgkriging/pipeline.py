"""File-to-file steps behind the command-line subcommands."""
from __future__ import annotations

import logging
import os

import numpy as np

from . import io
from .alpha import AlphaProfile, alpha_profile, heuristic_gap, seed_for
from .design import DesignSet, Model
from .errors import DomainError
from .pod import FittedState, pod_curves, pod_integrated_alpha, to_unit
from .posterior import ThetaDraws, sample_theta
from .predict import predictive_mixture, safe_prob
from .synthetic import gen_design, simulate_truth

log = logging.getLogger(__name__)


def n_workers(threads):
    if threads == 0:
        return os.cpu_count() or 1
    return max(1, threads)


def run_gen_design(cfg):
    design = gen_design(cfg.n_design, cfg.r, cfg.seed, cfg.n_perm)
    io.write_design(cfg.path("design"), design)
    return design


def run_simulate(cfg):
    design = io.read_design(cfg.path("design"))
    z = simulate_truth(design, cfg.truth, cfg.basis)
    io.write_observations(cfg.path("observations"), design, z)
    return design, z


def run_preprocess(cfg):
    """Physical-unit observations to unit-cube coordinates."""
    header, rows = io.read_csv(cfg.path("physical"))
    data = np.array([[float(x) for x in row] for row in rows])
    if data.shape[1] != cfg.r + 1:
        raise DomainError(f"physical file has {data.shape[1]} columns, expected {cfg.r + 1}")
    a = to_unit(cfg.depth_marginal, data[:, 0])
    x = cfg.nuisance.to_unit(data[:, 1:cfg.r]) if cfg.r > 1 else np.empty((len(data), 0))
    design = DesignSet(np.column_stack([a, x]))
    io.write_observations(cfg.path("observations"), design, data[:, -1])
    return design, data[:, -1]


def load_model(cfg):
    points, z = io.read_observations(cfg.path("observations"))
    return Model(DesignSet(points), cfg.basis), z


def run_fit(cfg, model=None, z=None):
    """Alpha scan; writes the profile (after each alpha), the draws and fit.json."""
    if model is None:
        model, z = load_model(cfg)
    grid = cfg.alpha_grid
    done = []

    def persist(fit):
        done.append(fit)
        if fit.draws is not None:
            io.write_draws(io.draws_path(cfg.out, fit.alpha), fit.draws.draws)
        partial = AlphaProfile(
            [f.alpha for f in done], [f.log_l_log for f in done], [f.log_l_map for f in done]
        )
        io.write_alpha_profile(cfg.path("alpha_profile"), partial)
        log.info("alpha=%s log_l_log=%s log_l_map=%s", fit.alpha, fit.log_l_log, fit.log_l_map)

    profile = alpha_profile(z, grid, model, cfg.mcmc, n_workers(cfg.threads), on_result=persist)
    alpha_hat = profile.argmax_log()
    summary = {
        "alpha_hat": alpha_hat,
        "alpha_map": profile.argmax_map(),
        "n": model.n,
        "r": model.r,
        "seed": cfg.seed,
        "alphas": [float(a) for a in profile.alphas],
        "acceptance_rates": [
            None if d is None else [float(x) for x in d.acceptance_rates] for d in profile.draws
        ],
    }
    try:
        mean, sd = heuristic_gap(profile)
        summary.update(gap_mean=mean, gap_sd=sd)
    except DomainError:
        pass
    io.write_json(cfg.path("fit"), summary)
    return profile, alpha_hat


def run_sample_theta(cfg, alpha):
    model, z = load_model(cfg)
    m = cfg.mcmc
    draws = sample_theta(
        z, alpha, model, m.n_iterations, m.thin, m.burn_in, seed_for(cfg.seed, alpha),
        prior=m.prior, fisher=m.fisher, jitter=m.jitter,
    )
    io.write_draws(io.draws_path(cfg.out, alpha), draws.draws)
    return draws


def fitted_alpha(cfg):
    if cfg.alpha is not None:
        return cfg.alpha
    return float(io.read_json(cfg.path("fit"))["alpha_hat"])


def load_state(cfg, model, z, alpha):
    thetas = io.read_draws(io.draws_path(cfg.out, alpha))
    draws = ThetaDraws(alpha, thetas, cfg.mcmc.n_iterations, cfg.mcmc.thin, cfg.mcmc.burn_in,
                       cfg.seed, np.full(model.r, np.nan))
    return FittedState(model, z, alpha, draws)


def run_predict(cfg):
    model, z = load_model(cfg)
    alpha = fitted_alpha(cfg)
    state = load_state(cfg, model, z, alpha)
    _, rows = io.read_csv(cfg.path("points"))
    pts = np.array([[float(x) for x in row[:model.r]] for row in rows])
    mix = predictive_mixture(z, alpha, state.draws, model, pts, cfg.jitter)
    safe = safe_prob(mix, cfg.threshold, cfg.normal_approx)
    # mixture summary: mean location; scale pooling component scales and spread
    loc = mix.locations.mean(axis=0)
    scale = np.sqrt(np.mean(mix.scales ** 2, axis=0) + mix.locations.var(axis=0))
    io.write_predictions(cfg.path("predictions"), pts, loc, scale, np.atleast_1d(safe))
    return pts, loc, scale, safe


def run_pod(cfg):
    model, z = load_model(cfg)
    alpha = fitted_alpha(cfg)
    state = load_state(cfg, model, z, alpha)
    curve = pod_curves(state, cfg.threshold, cfg.gammas, cfg.a_step, cfg.n_mc, cfg.seed,
                       cfg.common_random_numbers, cfg.normal_approx)
    io.write_pod_curve(cfg.path("pod_curve"), curve)
    out = {"fixed": curve}
    if cfg.integrated:
        profile = io.read_alpha_profile(cfg.path("alpha_profile"))
        curve_int = pod_integrated_alpha(
            profile, lambda a: load_state(cfg, model, z, a), cfg.threshold, cfg.gammas,
            cfg.mass_cutoff, cfg.a_step, cfg.n_mc, cfg.seed, cfg.common_random_numbers,
            cfg.normal_approx,
        )
        io.write_pod_curve(cfg.path("pod_curve_integrated"), curve_int)
        out["integrated"] = curve_int
    return out
