import numpy as np
import pytest

from sigkernels import Sequence


def random_sequence(rng, num_segments, dim, scale=1.0):
    """Random walk with N(0, scale^2) steps, starting at the origin."""
    steps = scale * rng.normal(size=(num_segments, dim))
    return Sequence(np.vstack([np.zeros(dim), np.cumsum(steps, axis=0)]))


def random_walk(rng, num_segments, dim=1, step=1.0, drift=0.0):
    steps = step * rng.normal(size=(num_segments, dim)) + drift
    return Sequence(np.vstack([np.zeros(dim), np.cumsum(steps, axis=0)]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
