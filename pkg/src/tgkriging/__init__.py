"""Trans-Gaussian Kriging with objective-Bayesian hyperparameter integration
and probability-of-detection curves."""

from .alpha import AlphaProfile, McmcConfig, alpha_profile, heuristic_gap, l_log, l_map
from .design import DesignSet, Model, ProjectionPair, TrendBasis, build_H, null_space, orthonormalize
from .errors import DomainError, IllConditioned, RankError, SamplerError, SingularPrior, Unreliable
from .likelihood import (
    GaussianHyper, log_lik_full, log_lik_integrated, log_lik_tg, log_lik_tg_integrated,
)
from .pod import FittedState, PodCurve, pod_curves, pod_integrated_alpha
from .posterior import (
    ThetaDraws, fisher_info, log_jeffreys_prior, log_unnorm_posterior, map_theta, sample_theta,
)
from .predict import (
    PredictiveMixture, StudentTPredictive, predictive_at, predictive_mixture, safe_prob,
    student_t_survival,
)
from .synthetic import SyntheticTruth, gen_design, simulate_truth
from .transform import TransformFamily, boxcox_eval, c_deriv, c_eval, c_inverse, transform_obs

__version__ = "0.1.0"
