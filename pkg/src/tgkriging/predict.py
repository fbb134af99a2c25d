"""Student-t predictive distributions and surrogate-model safety.

For fixed theta, integrating beta and sigma^2 out (prior 1/sigma^2) leaves a
Student-t predictive with n - p degrees of freedom. It is computed here by
generalized least squares; ``projected_predictive`` is an independent route
through the orthonormal trend basis P and the null-space basis W.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import ndtr, stdtr

from .alpha import MAX_SKIP_FRACTION
from .errors import DomainError, IllConditioned, SamplerError
from .kernel import check_theta, corr_from_sqdiff, sq_diffs
from .likelihood import cholesky, correlation
from .posterior import ThetaDraws
from .transform import c_eval, transform_obs

log = logging.getLogger(__name__)

# dof from which the normal tail may replace the Student tail, if asked to
NORMAL_DOF = 200


@dataclass(frozen=True)
class StudentTPredictive:
    dof: int
    location: float
    scale: float


def student_t_survival(dof, x, normal_approx=False):
    """P(T > x) for a standard Student-t with ``dof`` degrees of freedom."""
    if dof < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {dof}")
    x = np.asarray(x, dtype=float)
    out = ndtr(-x) if (normal_approx and dof >= NORMAL_DOF) else stdtr(dof, -x)
    return out[()] if out.ndim == 0 else out


def _check_points(x0, r):
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    if x0.shape[1] != r:
        raise DomainError(f"prediction points have {x0.shape[1]} coordinates, expected {r}")
    if np.any(x0 < 0) or np.any(x0 > 1) or not np.all(np.isfinite(x0)):
        raise DomainError("prediction points must lie in the unit cube")
    return x0


class KrigingPredictor:
    """Everything x0-independent for one (transformed data, theta) pair."""

    def __init__(self, model, y_t, theta, jitter=0.0):
        self.model = model
        self.theta = check_theta(theta, model.r)
        self.y = np.asarray(y_t, dtype=float)
        h = model.H
        c = cholesky(correlation(model, self.theta, jitter), "Sigma_theta")
        self.chol = c
        self.si_h = cho_solve((c, True), h, check_finite=False)
        a = h.T @ self.si_h
        self.chol_a = cholesky(0.5 * (a + a.T), "H^T Sigma^-1 H")
        self.beta = cho_solve((self.chol_a, True), self.si_h.T @ self.y, check_finite=False)
        resid = self.y - h @ self.beta
        self.si_resid = cho_solve((c, True), resid, check_finite=False)
        self.q2 = float(resid @ self.si_resid)
        self.dof = model.n - model.p

    def predict(self, x0):
        """Locations and scales at the rows of ``x0`` (shape (m, r))."""
        model = self.model
        x0 = _check_points(x0, model.r)
        k0 = corr_from_sqdiff(sq_diffs(x0, model.points), self.theta)
        h0 = model.basis.evaluate(x0)
        loc = h0 @ self.beta + k0 @ self.si_resid
        v = solve_triangular(self.chol, k0.T, lower=True, check_finite=False)
        u = h0 - k0 @ self.si_h
        w = solve_triangular(self.chol_a, u.T, lower=True, check_finite=False)
        factor = 1.0 - np.sum(v * v, axis=0) + np.sum(w * w, axis=0)
        scale = np.sqrt(np.maximum(factor, 0.0) * self.q2 / self.dof)
        # exact interpolation at design points
        hit_rows, hit_design = np.nonzero(np.all(x0[:, None, :] == model.points[None], axis=-1))
        loc[hit_rows] = self.y[hit_design]
        scale[hit_rows] = 0.0
        return loc, scale


def predictive_at(y_t, model, theta, x0, jitter=0.0):
    """Student-t predictive of the transformed output at one point x0."""
    pred = KrigingPredictor(model, y_t, theta, jitter)
    loc, scale = pred.predict(np.atleast_2d(x0))
    return StudentTPredictive(pred.dof, float(loc[0]), float(scale[0]))


def projected_predictive(y_t, model, theta, x0, jitter=0.0):
    """Same predictive through P and W.

    With h = H_{0,.} P^T (so h H equals the basis row at x0):
      E0 = h y,  S00 = 1 + h S h^T - 2 h s0,  S0 = h S - s0^T,
      location = E0 - S0 W (W^T S W)^-1 W^T y,
      scale^2  = q / (n-p) * (S00 - S0 W (W^T S W)^-1 W^T S0^T).
    S0 is taken as a 1 x n row, with no trailing factor.
    """
    x0 = _check_points(x0, model.r)[0]
    theta = check_theta(theta, model.r)
    y = np.asarray(y_t, dtype=float)
    p_mat, w = model.proj.P, model.W
    sigma = correlation(model, theta, jitter)
    s0 = corr_from_sqdiff(sq_diffs(x0[None], model.points), theta)[0]
    h00 = model.basis.evaluate(x0[None])[0]
    h0 = np.linalg.solve((p_mat.T @ model.H).T, h00)
    h = p_mat @ h0
    e0 = h @ y
    s00 = 1.0 + h @ sigma @ h - 2.0 * h @ s0
    s0row = h @ sigma - s0
    a = w.T @ sigma @ w
    ca = cholesky(0.5 * (a + a.T), "W^T Sigma W")
    proj_y = w @ cho_solve((ca, True), w.T @ y)
    proj_s = w @ cho_solve((ca, True), w.T @ s0row)
    q = float(y @ proj_y)
    dof = model.n - model.p
    loc = e0 - s0row @ proj_y
    var = q / dof * (s00 - s0row @ proj_s)
    return StudentTPredictive(dof, float(loc), float(np.sqrt(max(var, 0.0))))


@dataclass
class PredictiveMixture:
    """Equal-weight mixture over theta draws; arrays have one row per draw."""

    alpha: float
    dof: int
    locations: np.ndarray
    scales: np.ndarray

    @property
    def m(self):
        return self.locations.shape[0]

    @property
    def components(self):
        if self.locations.ndim != 1:
            raise ValueError("components are only listed for a single point")
        return [StudentTPredictive(self.dof, float(l), float(s))
                for l, s in zip(self.locations, self.scales)]


def predictive_mixture(z, alpha, draws, model, x0, jitter=0.0, chunk=20000):
    """Mixture predictive at one point (1-D x0) or many (2-D x0)."""
    thetas = draws.draws if isinstance(draws, ThetaDraws) else np.atleast_2d(draws)
    if thetas.shape[0] == 0:
        raise DomainError("no theta draws")
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    pts = _check_points(x0, model.r)
    y, _ = transform_obs(alpha, z)
    locs, scales = [], []
    skipped = 0
    for theta in thetas:
        try:
            pred = KrigingPredictor(model, y, theta, jitter)
        except IllConditioned:
            skipped += 1
            continue
        parts = [pred.predict(pts[i:i + chunk]) for i in range(0, len(pts), chunk)]
        locs.append(np.concatenate([p[0] for p in parts]))
        scales.append(np.concatenate([p[1] for p in parts]))
    if skipped:
        log.info("alpha=%s: skipped %d of %d ill-conditioned draws", alpha, skipped, len(thetas))
    if skipped > MAX_SKIP_FRACTION * len(thetas):
        raise SamplerError(f"{skipped} of {len(thetas)} draws are ill-conditioned")
    locs, scales = np.array(locs), np.array(scales)
    if single:
        locs, scales = locs[:, 0], scales[:, 0]
    return PredictiveMixture(float(alpha), model.n - model.p, locs, scales)


def component_exceedance(dof, locations, scales, level, normal_approx=False):
    """P(T > level) per component; zero-scale components are point masses."""
    locations = np.asarray(locations, dtype=float)
    scales = np.asarray(scales, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        std = (level - locations) / scales
    prob = student_t_survival(dof, np.where(scales > 0, std, 0.0), normal_approx)
    return np.where(scales > 0, prob, (locations > level).astype(float))


def safe_prob(mixture, s, normal_approx=False):
    """Surrogate-model safety P(Z > s), averaged over the mixture components.

    Monotonicity of the transformation gives P(Z > s) = P(Y > C_alpha(s)).
    Returns a float for a single point, an array for a batch.
    """
    if not s > 0:
        raise DomainError("threshold must be positive")
    level = float(c_eval(mixture.alpha, s))
    probs = component_exceedance(mixture.dof, mixture.locations, mixture.scales, level,
                                 normal_approx)
    out = probs.mean(axis=0)
    return float(out) if np.ndim(out) == 0 else out
