import pytest

from unpred.pipeline import load_example, prepare
from unpred.synthesis import synthesize

TASK = "F(p1 & F p2)"


@pytest.fixture(scope="session")
def robot():
    return load_example("robot6")


@pytest.fixture(scope="session")
def pipeline(robot):
    return prepare(robot, TASK)


@pytest.fixture(scope="session")
def dfa(pipeline):
    return pipeline[1]


@pytest.fixture(scope="session")
def prod(pipeline):
    return pipeline[2]


@pytest.fixture(scope="session")
def result3(prod):
    return synthesize(prod, 3)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
