import pytest

from lexsent.evaluation import make_folds
from lexsent.reference import build_reference


@pytest.fixture(scope="session")
def released():
    """The bundled 42-query benchmark corpus (built once per session)."""
    return build_reference("released")


@pytest.fixture(scope="session")
def tiny():
    """The 12-query small-strata corpus used for fast integration tests."""
    return build_reference("tiny")


@pytest.fixture(scope="session")
def released_folds(released):
    return make_folds(released, seed=0)
