import pytest

from exdiv.lattice import FIXTURES, build_lattice, parse_forest

ACCEPTANCE_RESULTS = []


@pytest.fixture(params=sorted(FIXTURES))
def any_lattice(request):
    return build_lattice(parse_forest(FIXTURES[request.param]))


@pytest.fixture
def chain1():
    return build_lattice(parse_forest(FIXTURES["CHAIN1"]))


@pytest.fixture
def chain3():
    return build_lattice(parse_forest(FIXTURES["CHAIN3"]))


@pytest.fixture
def sat3():
    return build_lattice(parse_forest(FIXTURES["SAT3"]))


@pytest.fixture
def pair4():
    return build_lattice(parse_forest(FIXTURES["PAIR4"]))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
