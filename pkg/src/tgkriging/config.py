"""Run configuration: a YAML document merged over built-in defaults."""
from __future__ import annotations

import copy
from pathlib import Path

import numpy as np
import yaml

from .alpha import McmcConfig
from .design import TrendBasis
from .errors import DomainError
from .pod import NuisanceDistribution, marginal_from_dict
from .synthetic import SyntheticTruth

DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "out": "out",
    "r": 3,
    "basis": "affine_a",
    "jitter": 0.0,
    "alpha": None,
    "design": {"n": 100, "n_perm": 50},
    "truth": {"beta": [6.0, 16.0], "sigma2": 1.0, "theta": [0.3, 0.3, 0.3], "alpha": 0.5},
    "alpha_grid": {"start": 0.0, "stop": 1.0, "step": 0.01},
    "mcmc": {
        "n_iterations": 9000, "thin": 90, "burn_in": 1000, "n_starts": 8,
        "prior": "jeffreys", "fisher": "projected",
    },
    "pod": {
        "threshold": 200.0, "gammas": [0.95, 0.99], "n_mc": 1000, "a_step": 0.01,
        "integrated": False, "mass_cutoff": 0.999, "common_random_numbers": False,
        "normal_approx": False,
    },
    "depth_marginal": {"type": "uniform", "lo": 0.0, "hi": 1.0},
    "nuisance": None,
    "files": {
        "design": "design.csv",
        "observations": "observations.csv",
        "physical": "physical.csv",
        "points": "points.csv",
        "alpha_profile": "alpha_profile.csv",
        "predictions": "predictions.csv",
        "pod_curve": "pod_curve.csv",
        "pod_curve_integrated": "pod_curve_integrated.csv",
        "fit": "fit.json",
    },
}


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, val in (over or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


class RunConfig:
    """Validated view over the merged configuration mapping."""

    def __init__(self, data=None):
        self.data = _merge(DEFAULTS, data)
        d = self.data
        self.seed = int(d["seed"])
        if self.seed < 0 or self.seed >= 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        self.threads = int(d["threads"])
        self.out = Path(d["out"])
        self.r = int(d["r"])
        if self.r < 1:
            raise DomainError("r must be positive")
        self.basis = TrendBasis(d["basis"])
        self.jitter = float(d["jitter"])
        if self.jitter < 0:
            raise DomainError("jitter must be nonnegative")
        self.alpha = None if d["alpha"] is None else float(d["alpha"])
        self.n_design = int(d["design"]["n"])
        self.n_perm = int(d["design"].get("n_perm", 50))
        g = d["alpha_grid"]
        if "values" in g:
            self.alpha_grid = np.asarray(g["values"], dtype=float)
        else:
            step = float(g["step"])
            if step <= 0:
                raise DomainError("alpha grid step must be positive")
            k = int(np.floor((float(g["stop"]) - float(g["start"])) / step + 1e-9))
            self.alpha_grid = np.round(float(g["start"]) + step * np.arange(k + 1), 10)
        m = d["mcmc"]
        self.mcmc = McmcConfig(
            n_iterations=int(m["n_iterations"]), thin=int(m["thin"]), burn_in=int(m["burn_in"]),
            seed=self.seed, n_starts=int(m["n_starts"]), prior=m["prior"], fisher=m["fisher"],
            jitter=self.jitter,
        )
        p = d["pod"]
        self.threshold = float(p["threshold"])
        if not self.threshold > 0:
            raise DomainError("threshold s must be positive")
        self.gammas = tuple(float(x) for x in p["gammas"])
        self.n_mc = int(p["n_mc"])
        self.a_step = float(p["a_step"])
        self.integrated = bool(p["integrated"])
        self.mass_cutoff = float(p["mass_cutoff"])
        self.common_random_numbers = bool(p["common_random_numbers"])
        self.normal_approx = bool(p["normal_approx"])
        if self.n_mc < 1:
            raise DomainError("n_mc must be positive")
        self.depth_marginal = marginal_from_dict(d["depth_marginal"])
        nuis = d["nuisance"]
        if nuis is None:
            nuis = [{"type": "uniform", "lo": 0.0, "hi": 1.0}] * (self.r - 1)
        if len(nuis) != self.r - 1:
            raise DomainError(f"expected {self.r - 1} nuisance marginals, got {len(nuis)}")
        self.nuisance = NuisanceDistribution([marginal_from_dict(x) for x in nuis])
        t = d["truth"]
        self.truth = SyntheticTruth(
            beta=t["beta"], sigma2=float(t["sigma2"]), theta_true=t["theta"],
            alpha_true=float(t["alpha"]), seed=int(t.get("seed", self.seed)),
        )
        self.files = d["files"]

    def path(self, key):
        return self.out / self.files[key]

    @classmethod
    def load(cls, path=None, **overrides):
        data = {}
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        for key, val in overrides.items():
            if val is not None:
                data[key] = val
        return cls(data)
