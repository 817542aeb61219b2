import sys

import pytest

from boundary_currents import ProductDomain, ellipse, unit_disc


@pytest.fixture(scope="session")
def disc():
    return ProductDomain([unit_disc()])


@pytest.fixture(scope="session")
def bidisc():
    return ProductDomain([unit_disc(), unit_disc()])


@pytest.fixture(scope="session")
def disc_ellipse():
    return ProductDomain([unit_disc(), ellipse(1.0, 0.6)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
