import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nary import catalog, verify  # noqa: E402


@pytest.fixture(scope="session")
def S3():
    return verify(catalog.get("S3"))


@pytest.fixture(scope="session")
def S4():
    return verify(catalog.get("S4"))


@pytest.fixture(scope="session")
def PL():
    return verify(catalog.get("PL"))


@pytest.fixture(scope="session")
def P3():
    return verify(catalog.get("P3"))


@pytest.fixture(scope="session")
def T1():
    return catalog.get("T1")
