import pytest

from torsion_units.grouptable import load_m11
from torsion_units.help_engine import AugmentationTuple, PowerAssignment
from torsion_units.solver import solve_all


@pytest.fixture(scope="session")
def m11():
    return load_m11()


@pytest.fixture(scope="session")
def table(m11):
    return m11[0]


@pytest.fixture(scope="session")
def brauer(m11):
    return m11[1]


@pytest.fixture(scope="session")
def all_tables(m11):
    t, b = m11
    return [t, b[2], b[3], b[5], b[11]]


@pytest.fixture(scope="session")
def catalogue(all_tables):
    return solve_all(all_tables)


@pytest.fixture(scope="session")
def tup(table):
    """tup(k, **{"2a": 1}) builds an AugmentationTuple by class name."""

    def make(k, values):
        return AugmentationTuple.make(k, {table.class_index(n): v for n, v in values.items()})

    return make


@pytest.fixture(scope="session")
def powers(tup):
    """Power assignment with the forced orders 2, 3, 5 filled in."""

    def make(**by_order):
        m = {2: tup(2, {"2a": 1}), 3: tup(3, {"3a": 1}), 5: tup(5, {"5a": 1})}
        m.update({int(k[1:]): v for k, v in by_order.items()})
        return PowerAssignment.make(m)

    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
