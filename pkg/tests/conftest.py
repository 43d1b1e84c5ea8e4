import numpy as np
import pytest

from choichol.channels import ChannelSpec, from_kraus
from choichol.linalg import elementary

_CRITERIA = []


def matrix_units(n):
    return np.array([[elementary(i, j, n) for j in range(n)] for i in range(n)])


@pytest.fixture
def identity_channel():
    return ChannelSpec(matrix_units(2))


@pytest.fixture
def halved_channel():
    return ChannelSpec(matrix_units(2) / 2)


@pytest.fixture
def depolarizing():
    """Φ(s) = tr(s)·I/2 on 2×2 matrices."""
    e = np.zeros((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        e[i, i] = np.eye(2) / 2
    return ChannelSpec(e)


@pytest.fixture
def transpose_map():
    u = matrix_units(2)
    return ChannelSpec(u.transpose(1, 0, 2, 3))


@pytest.fixture
def dephasing():
    return from_kraus([elementary(0, 0, 2), elementary(1, 1, 2)])


@pytest.fixture
def criterion():
    """Record one acceptance criterion; summarised at the end of the run."""

    def record(label, ok, detail):
        _CRITERIA.append((label, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
