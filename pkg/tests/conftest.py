import numpy as np
import pytest

from hsetkit.kernels import Kernel


@pytest.fixture
def gauss():
    return Kernel("gaussian", 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_spd(rng, n):
    A = rng.normal(size=(n, n))
    return A.T @ A + np.eye(n)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion."""

    def record(key, passed, detail=""):
        _ACCEPTANCE.append((key, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{key:<6} {'PASS' if passed else 'FAIL'}  {detail}")
