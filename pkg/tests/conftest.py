import sys

import numpy as np
import pytest

from finiteband.ergodic_operator import ErgodicSystem


def random_system(rng, p=None, d=None):
    """Random valid system with ``p <= 5``, ``d <= 3``."""
    p = int(rng.integers(1, 6)) if p is None else p
    d = int(rng.integers(1, 4)) if d is None else d
    q = rng.normal(size=(d + 1, p)) + 1j * rng.normal(size=(d + 1, p))
    q[0] = q[0].real
    q[d] = rng.uniform(0.3, 2.0, size=p)
    return ErgodicSystem(p, d, q)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.report_line(k))
