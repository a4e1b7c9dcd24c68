import re

import numpy as np
import pytest

from jackvar.empirical import from_samples

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome for the terminal summary."""

    def record(label, ok, detail=""):
        _ACCEPTANCE.append((label, bool(ok), detail))
        return ok

    return record


def _natural(record):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", record[0])]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(_ACCEPTANCE, key=_natural):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


@pytest.fixture
def s123():
    return from_samples([1.0, 2.0, 3.0])


@pytest.fixture
def s1234():
    return from_samples([1.0, 2.0, 3.0, 4.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
