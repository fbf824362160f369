import pytest

from arnoldgas import maps


@pytest.fixture(scope="session")
def model():
    return maps.default_model()
