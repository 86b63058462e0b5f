import os

import pytest
from hypothesis import HealthCheck, settings

from sagin_channel.fading import ShadowedRicianParams
from sagin_channel.montecarlo import McConfig
from sagin_channel.refraction import GeometryScenario, RefractionProfile

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SEED = 20240601


@pytest.fixture
def baseline_fading():
    return ShadowedRicianParams(b0=0.1, omega=0.8, m=4)


@pytest.fixture
def baseline_profile():
    return RefractionProfile(315.0, 7.5)


@pytest.fixture
def baseline_geometry():
    return GeometryScenario()


@pytest.fixture
def mc_config():
    return McConfig(trials=1_000_000, master_seed=SEED, stream_count=4)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one "PASS/FAIL criterion N: ..." line; printed now and in the summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number, passed, detail, seconds):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail} [{seconds:.2f} s]"
        lines.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
