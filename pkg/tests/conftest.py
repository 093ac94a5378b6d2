import pytest

from jlab.generators import generate, named_congruences
from jlab.maltsev import Flavor, find_terms, pad


@pytest.fixture(scope="session")
def l2():
    return generate("lattice-chain:2")


@pytest.fixture(scope="session")
def l3():
    return generate("lattice-chain:3")


@pytest.fixture(scope="session")
def sq():
    """The 2x2 lattice; element (i, j) is 2i + j."""
    return generate("lattice-prod:2x2")


@pytest.fixture(scope="session")
def sq_names(sq):
    return named_congruences(sq)


@pytest.fixture(scope="session")
def sq_j4(sq):
    """A Jonsson(4) system from a found majority term padded by two z-projections."""
    return pad(find_terms(sq, Flavor.jonsson(2)))


@pytest.fixture(scope="session")
def sq_j4_search(sq):
    """A Jonsson(4) system as returned directly by the search (non-trivial t_2)."""
    return find_terms(sq, Flavor.jonsson(4))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
