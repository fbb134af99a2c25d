"""Anisotropic geometric Matérn 5/2 correlation.

    k(d) = (1 + sqrt(5) d + 5 d^2 / 3) exp(-sqrt(5) d)
    d(u, v) = sqrt(sum_k ((u_k - v_k) / theta_k)^2)

No nugget is added unless a caller passes ``jitter`` explicitly.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

SQRT5 = np.sqrt(5.0)


def check_theta(theta, r=None):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.ndim != 1:
        raise DomainError("theta must be a vector")
    if not np.all(np.isfinite(theta)) or np.any(theta <= 0):
        raise DomainError(f"correlation lengths must be positive and finite: {theta}")
    if r is not None and theta.size != r:
        raise DomainError(f"expected {r} correlation lengths, got {theta.size}")
    return theta


def aniso_dist(u, v, theta):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if u.shape != v.shape:
        raise DomainError(f"dimension mismatch: {u.shape} vs {v.shape}")
    theta = check_theta(theta, u.size)
    return float(np.sqrt(np.sum(((u - v) / theta) ** 2)))


def matern52(d):
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be nonnegative")
    sd = SQRT5 * d
    out = (1.0 + sd + sd * sd / 3.0) * np.exp(-sd)
    return out[()] if out.ndim == 0 else out


def sq_diffs(a, b=None):
    """Per-dimension squared differences, shape (r, len(a), len(b))."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = a if b is None else np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise DomainError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    diff = a.T[:, :, None] - b.T[:, None, :]
    return np.ascontiguousarray(diff * diff)


def corr_from_sqdiff(sqd, theta):
    scaled = np.tensordot(1.0 / (theta * theta), sqd, axes=1)
    return matern52(np.sqrt(scaled))


def corr_and_grads(sqd, theta):
    """Correlation matrix and its derivatives w.r.t. each theta_k.

    dk/dtheta_k = (5/3)(1 + sqrt(5) d) exp(-sqrt(5) d) * diff_k^2 / theta_k^3,
    which is finite at d = 0.
    """
    d = np.sqrt(np.tensordot(1.0 / (theta * theta), sqd, axes=1))
    sd = SQRT5 * d
    e = np.exp(-sd)
    corr = (1.0 + sd + sd * sd / 3.0) * e
    common = (5.0 / 3.0) * (1.0 + sd) * e
    grads = common[None, :, :] * sqd / (theta ** 3)[:, None, None]
    return corr, grads


def corr_matrix(points, theta, jitter=0.0):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    theta = check_theta(theta, points.shape[1])
    sigma = corr_from_sqdiff(sq_diffs(points), theta)
    # exact symmetry and unit diagonal regardless of round-off
    sigma = 0.5 * (sigma + sigma.T)
    np.fill_diagonal(sigma, 1.0 + jitter)
    return sigma


def corr_cross(points, x0, theta):
    """Correlations between new point(s) ``x0`` and the design, shape (m, n).

    A single point gives a 1-D row of length n.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    x0 = np.atleast_2d(x0)
    if x0.shape[1] != points.shape[1]:
        raise DomainError(f"dimension mismatch: {x0.shape[1]} vs {points.shape[1]}")
    theta = check_theta(theta, points.shape[1])
    row = corr_from_sqdiff(sq_diffs(x0, points), theta)
    return row[0] if single else row


def corr_matrix_grad(points, theta, k):
    """Analytic derivative of the correlation matrix w.r.t. theta_k (0-based k)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    theta = check_theta(theta, points.shape[1])
    if not 0 <= k < points.shape[1]:
        raise DomainError(f"dimension index {k} out of range [0, {points.shape[1]})")
    _, grads = corr_and_grads(sq_diffs(points), theta)
    g = grads[k]
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 0.0)
    return g
