import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record a criterion's outcome; the summary is printed after the run."""

    def record(criterion, ok, detail):
        line = f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[criterion] = line
        print(line)
        return ok

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[key])
