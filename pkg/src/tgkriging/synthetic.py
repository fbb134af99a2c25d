"""Space-filling designs and a Trans-Gaussian stand-in for the simulator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DesignSet, TrendBasis, build_H
from .errors import DomainError
from .kernel import check_theta, corr_matrix
from .likelihood import cholesky
from .posterior import lhs_unit
from .transform import c_inverse


def gen_design(n, r, seed=0, n_perm=50):
    """Maximin Latin hypercube: one point per stratum [k/n, (k+1)/n) per coordinate."""
    if n < 2:
        raise DomainError("a design needs at least 2 points")
    if r < 1:
        raise DomainError("r must be positive")
    rng = np.random.default_rng(seed)
    return DesignSet(lhs_unit(n, r, rng, n_perm))


@dataclass
class SyntheticTruth:
    beta: np.ndarray
    sigma2: float
    theta_true: np.ndarray
    alpha_true: float
    seed: int = 0

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        self.theta_true = check_theta(self.theta_true)
        if not self.sigma2 >= 0:
            raise DomainError("sigma2 must be nonnegative")
        if not 0 <= self.alpha_true <= 1:
            raise DomainError("alpha_true must lie in [0, 1]")


def simulate_gaussian(design, truth, basis=None):
    """y ~ N(H beta, sigma2 Sigma_theta) with seeded standard normals."""
    pts = design.points if isinstance(design, DesignSet) else np.atleast_2d(design)
    h = build_H(pts, basis or TrendBasis())
    sigma = corr_matrix(pts, truth.theta_true)
    c = cholesky(sigma, "Sigma_theta_true")
    eps = np.random.default_rng(truth.seed).standard_normal(pts.shape[0])
    return h @ truth.beta + np.sqrt(truth.sigma2) * (c @ eps)


def simulate_truth(design, truth, basis=None):
    """Positive outputs z = C_alpha^-1(y) for a Gaussian field y."""
    return c_inverse(truth.alpha_true, simulate_gaussian(design, truth, basis))
