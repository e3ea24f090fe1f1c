import os

import pytest
from hypothesis import HealthCheck, settings

from ellres.curve import Curve

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")
GOLDENS = os.path.join(ROOT, "goldens")

_ACCEPTANCE: list = []


@pytest.fixture(scope="session")
def E5():
    """y^2 = x^3 + 1 over F_5; E(F_5) is cyclic of order 6."""
    return Curve(5, 0, 1)


@pytest.fixture(scope="session")
def pts5(E5):
    O = E5.infinity()
    return {
        "O": O,
        "P": E5.point(0, 1),   # order 3
        "Q": E5.point(2, 2),   # order 6
        "T": E5.point(4, 0),   # order 2
    }


@pytest.fixture
def criterion():
    def record(n: int, ok: bool, detail: str):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append((n, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
