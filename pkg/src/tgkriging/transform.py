"""Output transformations: the sinh-log family and Box-Cox.

The sinh-log family is

    C_alpha(t) = sinh(alpha * log t) / alpha     (alpha > 0)
    C_0(t)     = log t

It maps (0, inf) onto the whole real line for every alpha >= 0 and is the
family used by the model. Box-Cox is kept for comparison plots only.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

# below this |alpha * log t| the sinh ratio is evaluated by its Taylor series
SMALL_ARG = 1e-4

SINH_LOG = "sinhlog"
BOX_COX = "boxcox"


def _check_alpha(alpha):
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < 0:
        raise DomainError(f"alpha must be a finite nonnegative real, got {alpha!r}")
    return alpha


def _check_positive(t):
    t = np.asarray(t, dtype=float)
    bad = ~(t > 0)
    if np.any(bad):
        idx = np.flatnonzero(bad.ravel())[0]
        raise DomainError(
            f"transform input must be positive; entry {idx} is {t.ravel()[idx]!r}"
        )
    return t


def _sinh_over(x, alpha, logt):
    """sinh(x)/alpha with x = alpha*logt, stable as alpha -> 0."""
    small = np.abs(x) < SMALL_ARG
    with np.errstate(invalid="ignore", divide="ignore"):
        big = np.sinh(x) / alpha if alpha > 0 else np.zeros_like(x)
    x2 = x * x
    series = logt * (1.0 + x2 / 6.0 + x2 * x2 / 120.0)
    return np.where(small, series, big)


def c_eval(alpha, t):
    """Sinh-log transform C_alpha(t). Scalars in, scalar out; arrays broadcast."""
    alpha = _check_alpha(alpha)
    t = _check_positive(t)
    logt = np.log(t)
    if alpha == 0.0:
        out = logt
    else:
        out = _sinh_over(alpha * logt, alpha, logt)
    return out[()] if out.ndim == 0 else out


def c_deriv(alpha, t):
    """Derivative of C_alpha: cosh(alpha * log t) / t."""
    alpha = _check_alpha(alpha)
    t = _check_positive(t)
    out = np.cosh(alpha * np.log(t)) / t
    return out[()] if out.ndim == 0 else out


def c_log_deriv(alpha, t):
    """log C_alpha'(t), computed without overflowing cosh for large |log t|."""
    alpha = _check_alpha(alpha)
    t = _check_positive(t)
    logt = np.log(t)
    x = np.abs(alpha * logt)
    # log cosh x = x + log1p(exp(-2x)) - log 2
    out = x + np.log1p(np.exp(-2.0 * x)) - np.log(2.0) - logt
    return out[()] if out.ndim == 0 else out


def c_inverse(alpha, y):
    """Inverse of C_alpha: exp(asinh(alpha*y)/alpha), or exp(y) at alpha = 0."""
    alpha = _check_alpha(alpha)
    y = np.asarray(y, dtype=float)
    if alpha == 0.0:
        out = np.exp(y)
    else:
        x = alpha * y
        small = np.abs(x) < SMALL_ARG
        x2 = x * x
        # asinh(x)/alpha = y * (1 - x^2/6 + 3x^4/40 - ...)
        series = y * (1.0 - x2 / 6.0 + 3.0 * x2 * x2 / 40.0)
        out = np.exp(np.where(small, series, np.arcsinh(x) / alpha))
    return out[()] if out.ndim == 0 else out


def boxcox_eval(alpha, t):
    """Box-Cox transform (t**alpha - 1)/alpha, log t at alpha = 0."""
    alpha = _check_alpha(alpha)
    t = _check_positive(t)
    if alpha == 0.0:
        out = np.log(t)
    else:
        out = np.expm1(alpha * np.log(t)) / alpha
    return out[()] if out.ndim == 0 else out


def transform_obs(alpha, z):
    """Apply C_alpha to a vector of observations.

    Returns the transformed vector and the log-Jacobian sum_i log C_alpha'(z_i).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check_positive(z)
    return np.atleast_1d(c_eval(alpha, z)), float(np.sum(c_log_deriv(alpha, z)))


class TransformFamily:
    """A member of a transformation family, fixed by its ``alpha``."""

    def __init__(self, alpha, family=SINH_LOG):
        if family not in (SINH_LOG, BOX_COX):
            raise DomainError(f"unknown transformation family {family!r}")
        self.alpha = _check_alpha(alpha)
        self.family = family

    def __call__(self, t):
        if self.family == SINH_LOG:
            return c_eval(self.alpha, t)
        return boxcox_eval(self.alpha, t)

    def inverse(self, y):
        if self.family == SINH_LOG:
            return c_inverse(self.alpha, y)
        alpha = self.alpha
        y = np.asarray(y, dtype=float)
        if alpha == 0.0:
            return np.exp(y)
        if np.any(alpha * y <= -1.0):
            raise DomainError("value outside the Box-Cox range (-1/alpha, inf)")
        return np.exp(np.log1p(alpha * y) / alpha)

    def deriv(self, t):
        if self.family == SINH_LOG:
            return c_deriv(self.alpha, t)
        t = _check_positive(t)
        return t ** (self.alpha - 1.0)

    def __repr__(self):
        return f"TransformFamily(alpha={self.alpha!r}, family={self.family!r})"
