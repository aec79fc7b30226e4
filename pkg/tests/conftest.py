import pytest
from hypothesis import HealthCheck, settings

from maxcurves.gf import field_of_order

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# criterion number -> (passed, title); filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def F4():
    return field_of_order(4)


@pytest.fixture(scope="session")
def w(F4):
    return F4.parse("w")


@pytest.fixture(scope="session")
def cubic_scan():
    from maxcurves import maximal

    return maximal.scan_cubics()


@pytest.fixture(scope="session")
def maximal_report(cubic_scan):
    from maxcurves import maximal

    return maximal.classify_maximal(scan=cubic_scan)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {title}")
