import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvop.dsl import CATALOG_SOURCES, builtin_catalog

settings.register_profile(
    "curvop", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("curvop")

CATALOG = tuple(CATALOG_SOURCES)


@pytest.fixture(scope="session")
def cone():
    return builtin_catalog("cone")


@pytest.fixture(scope="session")
def cylinder():
    return builtin_catalog("cylinder")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_points(sdef, n, rng, margin=0.02):
    """``n`` uniform random chart points, kept off the domain edges."""
    (u0, u1), (v0, v1) = sdef.bounds()
    du, dv = margin * (u1 - u0), margin * (v1 - v0)
    return rng.uniform(u0 + du, u1 - du, n), rng.uniform(v0 + dv, v1 - dv, n)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
