import numpy as np
import pytest

from wsnstego.dctmodel import forward
from wsnstego.fieldsim import FieldConfig, build_field, sense_snapshot
from wsnstego.imageio import snapshot_to_gray

# Filled by tests/test_acceptance.py, printed once at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def criterion():
    """``criterion(n, ok, detail)`` records one acceptance line and returns ``ok``."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


@pytest.fixture(scope="session")
def field256():
    return build_field(FieldConfig(seed=1))


@pytest.fixture(scope="session")
def snapshot256(field256):
    return sense_snapshot(field256, 100, 7)


@pytest.fixture(scope="session")
def gray256(field256, snapshot256):
    return snapshot_to_gray(snapshot256, field256)


@pytest.fixture(scope="session")
def plane256(gray256):
    return forward(gray256, 80)


@pytest.fixture(scope="session")
def small_field():
    return build_field(FieldConfig(side_length=64, zone_counts=(6, 4, 2), seed=5))


@pytest.fixture(scope="session")
def small_plane(small_field):
    snap = sense_snapshot(small_field, 90, 11)
    return forward(snapshot_to_gray(snap, small_field), 80)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
