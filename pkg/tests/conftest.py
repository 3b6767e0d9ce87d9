import subprocess
import sys

import pytest

from acoumetro.budget import bundled_path


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "acoumetro", *map(str, args)],
        capture_output=True, text=True, cwd=cwd,
    )


@pytest.fixture
def data():
    """Path to a bundled data file by name."""
    return lambda name: str(bundled_path(name))


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict line, then assert it."""

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
