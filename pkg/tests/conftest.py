import numpy as np
import pytest

from matterwave.units import RB87, UnitSystem

UNITS = UnitSystem(RB87)


def us2t(microseconds: float) -> float:
    """Physical microseconds -> dimensionless time (Rb87 preset)."""
    return UNITS.microseconds_to_time(microseconds)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)


@pytest.fixture(autouse=True)
def _no_ambient_cache(monkeypatch):
    # keep runs hermetic: only tests that opt in use a cache directory
    monkeypatch.delenv("MATTERWAVE_CACHE_DIR", raising=False)


#: one [PASS]/[FAIL] line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
