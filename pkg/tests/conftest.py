import math

import numpy as np
import pytest

from jensen_order.instances import paper_example

SQRT2 = math.sqrt(2.0)

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] criterion {number:2d}: {title}"
    if detail:
        line += f" ({detail})"
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ex():
    return paper_example()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
