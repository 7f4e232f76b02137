import pytest

from gridanimal.construction import build_2d_example, build_animal
from gridanimal.fixtures import load_pair


@pytest.fixture(scope="session")
def rec_a():
    return build_animal(*load_pair("a"))


@pytest.fixture(scope="session")
def rec_b():
    return build_animal(*load_pair("b"))


@pytest.fixture(scope="session")
def animal_a(rec_a):
    return rec_a.animal


@pytest.fixture(scope="session")
def rec_2d():
    return build_2d_example()
