import numpy as np
import pytest

from npassive.spectra import DiagonalState


def random_state(rng, d: int) -> DiagonalState:
    pops = rng.dirichlet(np.ones(d))
    return DiagonalState(tuple(pops))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
