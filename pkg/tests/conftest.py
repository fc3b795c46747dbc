import pytest
from hypothesis import settings

from cheegerlab import chains

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def two_point():
    return chains.two_point()


@pytest.fixture
def c3():
    return chains.cycle(3)


@pytest.fixture
def lazy_c3():
    return chains.cycle(3, laziness=0.5)
