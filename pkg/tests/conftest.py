import pytest

from quest.catalog import default_catalog


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()
