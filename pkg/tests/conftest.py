import pytest
from hypothesis import settings

from netrw.oracle import EnumerationSpec, enumerate_nets

settings.register_profile("netrw", max_examples=60, deadline=None)
settings.load_profile("netrw")


@pytest.fixture(scope="session")
def universe():
    return enumerate_nets(EnumerationSpec())


@pytest.fixture(scope="session")
def small_universe():
    return enumerate_nets(EnumerationSpec(max_vertices=2))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance")
        for line in REPORT:
            terminalreporter.write_line(line)
