import numpy as np
import pytest

from quasigauss import make_params

_ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one acceptance outcome: record(number, ok, summary)."""

    def _record(number, ok, summary):
        _ACCEPTANCE[number] = (bool(ok), summary)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, summary = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {summary}")


@pytest.fixture
def std_normal():
    return make_params(0.0, 0.0, 0.0, 1.0, 0.5)


@pytest.fixture
def quad2():
    """alpha = (2, 2), sigma = 1, symmetric: C1 = C2 = 1."""
    return make_params(0.0, 2.0, 2.0, 1.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
