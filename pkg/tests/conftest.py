import pytest
from hypothesis import HealthCheck, settings

from woodwalk.codec import decode
from woodwalk.sampling import enumerate_Wn

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def words_upto4():
    return [w for n in range(1, 5) for w in enumerate_Wn(n)]


@pytest.fixture(scope="session")
def maps_upto4(words_upto4):
    return [decode(w) for w in words_upto4]
