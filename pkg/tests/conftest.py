import math

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from rapdibc import Instance, random_instance

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")


def close(a, b, tol=1e-8):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@st.composite
def admissible_instances(draw, n_max=6, m_max=3, integer=False):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(1, m_max))
    return random_instance(np.random.default_rng(seed), n, m, integer=integer)


def toy(R=5.0, n=3, integer=False):
    """``n`` idle-or-charge variables in {0} u [2, 4] with b = 0."""
    return Instance(b=[0] * n, first_lower=[0] * n, last_upper=[4] * n,
                    shared_lower=[2], shared_upper=[0], R=R, integer=integer)


def counterexample():
    return Instance(b=[-0.85, -1.5, -1.5], first_lower=[0, 0, 0], last_upper=[3, 3, 3],
                    shared_lower=[1], shared_upper=[0], R=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
