from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# (criterion number, label) -> "PASS" / "FAIL"
ACCEPTANCE_RESULTS: dict[tuple[int, str], str] = {}


@pytest.fixture
def record_criterion():
    """Record a pass/fail line for an acceptance criterion.

    Use as a context manager so an assertion failure is recorded before it
    propagates.
    """

    class _Recorder:
        def __init__(self):
            self.key = None

        def __call__(self, number: int, label: str):
            self.key = (number, label)
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            # a criterion checked by several tests passes only if every part does
            if exc_type or ACCEPTANCE_RESULTS.get(self.key) == "FAIL":
                ACCEPTANCE_RESULTS[self.key] = "FAIL"
            else:
                ACCEPTANCE_RESULTS[self.key] = "PASS"
            return False

    return _Recorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for (number, label), status in sorted(ACCEPTANCE_RESULTS.items()):
        terminalreporter.write_line(f"criterion {number:2d} {status}: {label}")
