import pytest

from entrolab.checks import GridContext


@pytest.fixture(scope="session")
def ctx():
    """Shared grid context at default numerics; caches discretizations."""
    return GridContext()
