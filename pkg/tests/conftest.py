import numpy as np
import pytest

from cvesd import TwinBeamVariances

FRAGILE = TwinBeamVariances(0.5, 2.1, 1.7, 2.05)
ROBUST = TwinBeamVariances(0.5, 3.0, 0.5, 3.0)

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def report():
    """Collects one PASS/FAIL line per acceptance check for the terminal summary."""

    def _report(name, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f"  ({detail})" if detail else ""))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
