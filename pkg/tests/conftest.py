import math
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from deflator_lab import enlarge_progressively, eta_martingales, fixture_m1, fixture_m2, mult_decomp  # noqa: E402

settings.register_profile("exact", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("exact")


def rows(X):
    return [list(r) for r in X]


def times(R):
    return [r if r == math.inf else int(r) for r in R]


class Fixture:
    def __init__(self, F, tau):
        self.F, self.tau = F, tau
        self.pair = enlarge_progressively(F, tau)
        self.G = self.pair.G_space
        self.b = self.pair.bundle
        self.vt = self.pair.vt
        self.md = mult_decomp(self.b, self.vt)
        self.em = eta_martingales(self.b, self.vt)


@pytest.fixture
def m1():
    return Fixture(*fixture_m1())


@pytest.fixture
def m2():
    return Fixture(*fixture_m2())


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module and module.LINES:
        terminalreporter.section("acceptance criteria")
        for line in module.LINES:
            terminalreporter.write_line(line)
