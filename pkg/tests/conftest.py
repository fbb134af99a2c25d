import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tgkriging.design import Model, TrendBasis  # noqa: E402
from tgkriging.synthetic import SyntheticTruth, gen_design, simulate_gaussian  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_model():
    return Model(gen_design(12, 2, seed=3))


@pytest.fixture
def toy_1d():
    """r = 1, n = 10, constant trend: a proper, well-resolved posterior."""
    basis = TrendBasis("constant")
    design = gen_design(10, 1, seed=4)
    model = Model(design, basis)
    y = simulate_gaussian(design, SyntheticTruth([0.0], 1.0, [0.2], 0.0, seed=3), basis)
    return model, np.exp(y)
