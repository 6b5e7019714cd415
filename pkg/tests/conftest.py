import os

import pytest

from agilemap import load_map

from helpers import REPO_ROOT, SEED_PATH


@pytest.fixture(scope="session")
def seed_path():
    return SEED_PATH


@pytest.fixture(scope="session")
def seed_map():
    return load_map(SEED_PATH)


@pytest.fixture(scope="session")
def full_map_path():
    """Path to the full 47-relation dataset, or None when not available.

    The full map is distributed separately from this repository; tests that
    audit it look for an AGILEMAP_FULL_MAP environment variable first, then
    for seed/agile-map-full.agilemap.
    """
    configured = os.environ.get("AGILEMAP_FULL_MAP")
    if configured:
        return configured
    candidate = REPO_ROOT / "seed" / "agile-map-full.agilemap"
    return candidate if candidate.exists() else None


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.passed:
        word = "PASS"
    elif report.skipped:
        word = "SKIP"
    else:
        word = "FAIL"
    item.config.get_terminal_writer().write(
        f"\n[acceptance criterion {number}] {word}: {title}\n"
    )
