import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import ssdenlarge as s

settings.register_profile("pkg", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pkg")


@pytest.fixture
def p1():
    return s.product(1)


@pytest.fixture
def identity_graph(p1):
    return s.AffineGraph(p1, [[1.0]], [0.0])


@pytest.fixture
def abs_fn():
    return s.MaxAffine([[1.0], [-1.0]], [0.0, 0.0])


@pytest.fixture
def abs_graph(p1, abs_fn):
    return s.SubdiffGraph(p1, abs_fn)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, msg = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
