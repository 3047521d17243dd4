import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from periph import corpus8
from periph.defsolve import DeformationProblem

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def pres():
    return corpus8.presentation_fig8()


@pytest.fixture(scope="session")
def lm():
    return corpus8.canonical_peripheral_words()


@pytest.fixture(scope="session")
def reps():
    return {name: corpus8.load_named(name).rep for name in corpus8.NAMES}


@pytest.fixture(scope="session")
def geom3_prob(reps, lm):
    l, m = lm
    return DeformationProblem.at(reps["geom3"], l, m)


@pytest.fixture(scope="session")
def geom2_prob(reps, lm):
    l, m = lm
    return DeformationProblem.at(reps["geom2"], l, m)


@pytest.fixture(scope="session")
def rho2_prob(reps, lm):
    l, m = lm
    return DeformationProblem.at(reps["rho2"], l, m)


def ray_32(t):
    z = (1 + t) * np.exp(1j * t)
    return np.array([z, np.conj(z)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
