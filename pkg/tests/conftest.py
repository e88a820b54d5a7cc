import pytest

from infserv.dist import Deterministic, Exponential
from infserv.repair import RepairScenario

P_SWEEP = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1]


def example_scenario(p=0.9, q=0.3):
    """Base and station repairs exponential with mean 1 week, transport 1 week fixed."""
    return RepairScenario(0.25, q, p, Exponential(1.0), Exponential(1.0), Deterministic(1.0), 52.0)


@pytest.fixture
def scenario():
    return example_scenario()


# acceptance verdict lines, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
