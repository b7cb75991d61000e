import pytest

from mcsense import active_set, channel_plan, random_pattern

# Reference scenario used throughout: 32 channels of 10 MHz, up to 8
# occupied, six actives, ten cosets at alpha = 0.3125.
DEMO_ACTIVE = (8, 16, 17, 18, 29, 30)
PATTERN_SEED = 5


@pytest.fixture(scope="session")
def plan32():
    return channel_plan(32, 10e6, 8)


@pytest.fixture(scope="session")
def demo_active():
    return active_set(DEMO_ACTIVE)


@pytest.fixture(scope="session")
def pattern10(plan32):
    return random_pattern(plan32.L, 10, PATTERN_SEED)
