import sys
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from divergences.divergence import DivergenceSpec  # noqa: E402
from model_space.model_space import Act, HullMode, Model, ModelSet, StateSpace  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_states():
    return StateSpace(("s0", "s1"))


@pytest.fixture
def symmetric_q(two_states):
    """Q = {(0.9, 0.1), (0.1, 0.9)}, the running two-model example."""
    return ModelSet((Model([0.9, 0.1], two_states, "left"), Model([0.1, 0.9], two_states, "right")))


@pytest.fixture
def half_half(two_states):
    return Model([0.5, 0.5], two_states)


@pytest.fixture
def entropic():
    return DivergenceSpec.entropic(1.0)


@pytest.fixture
def gini_spec():
    return DivergenceSpec.gini(1.0)


def random_model(rng, space, full_support=True):
    w = rng.dirichlet(np.ones(space.n))
    if full_support:
        w = np.maximum(w, 1e-3)
    return Model(w / w.sum(), space)


def random_model_set(rng, space, k, hull_mode=HullMode.EXTREME_POINTS_ONLY):
    return ModelSet(tuple(random_model(rng, space) for _ in range(k)), hull_mode)


def random_act(rng, space, name="f", low=-5.0, high=5.0):
    return Act(rng.uniform(low, high, space.n), name, space)


def interior_model(rng, space, concentration=4.0):
    """A model kept away from the simplex faces, so mixtures of it have moderate curvature."""
    return Model(rng.dirichlet(np.full(space.n, concentration)), space)
