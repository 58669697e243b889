import pytest

from isospec.finfield import make_field


@pytest.fixture
def F4():
    return make_field(2, 2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
