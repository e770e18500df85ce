import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anchornys.dataio import Dataset, make_rng  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(12345)


def random_dataset(seed, n=60, d=2, scale=1.0):
    return Dataset(make_rng(seed).random((n, d)) * scale, source=f"random:{seed}")


@pytest.fixture
def small_ds():
    return random_dataset(0, n=80, d=3)


def pytest_configure(config):
    np.set_printoptions(precision=6, suppress=True)


# acceptance criteria register one line each; printed after the test summary
ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
