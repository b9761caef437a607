"""Shared fixtures: acceptance-criterion reporting.

The acceptance tests record one pass/fail line each; the lines are
echoed in a terminal summary section so a plain pytest run shows the
per-criterion outcome at its stated tolerance.
"""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record and assert one acceptance-criterion outcome."""

    def record(num, ok, detail):
        line = "criterion %2d %s: %s" % (num, "PASS" if ok else "FAIL", detail)
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
