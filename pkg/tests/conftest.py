import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from betamix.ground import GroundSpace
from betamix.process import DiscreteDPP


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_site():
    return DiscreteDPP(GroundSpace.line(2), [[0.5, 0.3], [0.3, 0.5]])


@pytest.fixture
def rank_one():
    return DiscreteDPP(GroundSpace.line(2), [[0.4, 0.4], [0.4, 0.4]])


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(capsys):
    """Record and print the one-line verdict of an acceptance criterion."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
