import time

import pytest
from hypothesis import settings

from nvforge.transport import DIAMOND, HELIUM, TransportConfig, simulate_transport

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# (criterion number, title, passed, detail) collected by test_acceptance.py
ACCEPTANCE = []


@pytest.fixture(scope="session")
def he_profile_timed():
    """2 MeV He in diamond, 10^4 ions, seed 42, with wall time (includes any JIT compile)."""
    t0 = time.perf_counter()
    profile = simulate_transport(HELIUM, DIAMOND, TransportConfig(ion_count=10_000, rng_seed=42))
    return profile, time.perf_counter() - t0


@pytest.fixture(scope="session")
def he_profile(he_profile_timed):
    return he_profile_timed[0]


@pytest.fixture(scope="session")
def small_profile():
    return simulate_transport(HELIUM, DIAMOND, TransportConfig(ion_count=500, rng_seed=7))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}")
