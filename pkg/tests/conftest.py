import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from apollonian.curvature import CurvatureVector  # noqa: E402


@pytest.fixture
def g236():
    return CurvatureVector(2, 3, 6, 6)


@pytest.fixture
def g111():
    return CurvatureVector.from_triple(1.0, 1.0, 1.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
