import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ALPHAS = (1.2, 1.5, 1.8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
