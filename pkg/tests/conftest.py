import pytest

from scatterlen_cli.core.geometry import default_system, symmetric_system
from scatterlen_cli.core.store import build_spectrum


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run long spectrum builds")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def asymmetric():
    return default_system()


@pytest.fixture(scope="session")
def symmetric():
    return symmetric_system(6.0, 1.0)


@pytest.fixture(scope="session")
def default_db(asymmetric):
    """Primitive orbits of the default system with up to 8 reflections."""
    return build_spectrum(asymmetric, 8)


@pytest.fixture(scope="session")
def large_db(asymmetric):
    return build_spectrum(asymmetric, 12, threads=4)


@pytest.fixture(scope="session")
def deep_db(large_db, asymmetric):
    """Extends large_db to 14 reflections."""
    return build_spectrum(asymmetric, 14, threads=4, existing=large_db)
