import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion and assert it."""
    def check(label, value, tol, passed=None):
        ok = value <= tol if passed is None else passed
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {value:.3e} (tol {tol:.0e})")
        assert ok, f"{label}: {value!r} exceeds {tol!r}"
    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
