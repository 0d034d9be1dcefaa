import pytest
from hypothesis import HealthCheck, settings

from cwforge.formats import parse_word

import fixtures

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

# lines appended by the acceptance tests, echoed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def chain_word():
    return parse_word(fixtures.CHAIN_WORD)


@pytest.fixture
def chain_term():
    return fixtures.chain_term()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
