import numpy as np
import pytest

from stab.geometry import assemble_fem, build_icosphere

# one line per acceptance criterion, printed in the terminal summary
CRITERIA_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ops3():
    return assemble_fem(build_icosphere(3))


@pytest.fixture(scope="session")
def ops2():
    return assemble_fem(build_icosphere(2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
