import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_small_polytope(rng, max_vertices=8, max_dim=6):
    k = int(rng.integers(1, max_vertices + 1))
    p = int(rng.integers(1, max_dim + 1))
    return rng.standard_normal((k, p)) * rng.uniform(0.5, 2.0)
