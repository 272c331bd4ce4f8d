import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


# the five parameter pairs exercised throughout: one per regime
REGIME_PARAMS = {
    "Rank1Heisenberg": (0.0, 0.0),
    "Rank1BetaPos": (0.0, 1.0),
    "DeltaPos": (1.0, 0.0),
    "DeltaNeg": (-1.0, 0.0),
    "DeltaZero": (-1.0, 2.0),
}


@pytest.fixture(params=sorted(REGIME_PARAMS))
def regime_params(request):
    return REGIME_PARAMS[request.param]
