import sys

import numpy as np
import pytest

from usdbound.corpus import EXAMPLE_I_STATES, EXAMPLE_II_STATES, geometrically_uniform_states
from usdbound.statesets import make_stateset


def random_stateset(rng, n, d=None, real=False, prior_floor=0.05):
    d = n if d is None else d
    while True:
        a = rng.normal(size=(n, d))
        if not real:
            a = a + 1j * rng.normal(size=(n, d))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        p = rng.uniform(prior_floor, 1.0, size=n)
        p /= p.sum()
        try:
            return make_stateset(a, p)
        except ValueError:
            continue


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def example1():
    return make_stateset(EXAMPLE_I_STATES)


@pytest.fixture
def example2():
    return make_stateset(EXAMPLE_II_STATES, [0.30, 0.35, 0.35])


@pytest.fixture
def example3():
    return make_stateset(EXAMPLE_II_STATES, [0.10, 0.80, 0.10])


@pytest.fixture
def four_state_gu():
    return make_stateset(geometrically_uniform_states())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
