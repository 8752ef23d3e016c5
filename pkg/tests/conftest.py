import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))

settings.register_profile("dmw", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dmw")

SEED = int(os.environ.get("DMW_SEED", "20261015"))


@pytest.fixture
def seed():
    return SEED


@pytest.fixture
def rng():
    return random.Random(SEED)
