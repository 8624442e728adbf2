import numpy as np
import pytest

from wpot import Sphere, Torus, random_generic_measure


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_measure(manifold, seed, n_atoms=None, separation=0.05):
    return random_generic_measure(
        manifold, np.random.default_rng(seed), n_atoms=n_atoms, separation=separation
    )


@pytest.fixture(params=[Torus(1), Torus(2), Torus(3), Sphere(1), Sphere(2)],
                ids=["T1", "T2", "T3", "S1", "S2"])
def any_manifold(request):
    return request.param
