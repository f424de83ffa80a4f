import pytest

from lucent import corpus


@pytest.fixture(scope="session")
def choice1():
    return corpus.load("CHOICE1")


@pytest.fixture(scope="session")
def ring2():
    return corpus.load("RING2")


@pytest.fixture(scope="session")
def ring2x3():
    return corpus.load("RING2X3")


@pytest.fixture(scope="session")
def fig1():
    return corpus.load("FIG1")
