import json
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def cvp6():
    with open(FIXTURES / "cvp6.json") as fh:
        return json.load(fh)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # The acceptance module records one line per criterion; echo them after
    # the normal summary so they survive output capture.  Look the module up
    # in sys.modules so we read the instance pytest actually executed.
    lines = []
    for name, module in list(sys.modules.items()):
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(module, "RESULTS", [])
            if lines:
                break
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
