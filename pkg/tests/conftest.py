import os

import pytest

from crit_cycle import power_law


@pytest.fixture(scope="session")
def spec_r1():
    return power_law(1.0, 10.0)


def pytest_report_header(config):
    from crit_cycle import backend_name
    return f"crit_cycle backend: {backend_name()} (CRIT_CYCLE_NUMBA={os.environ.get('CRIT_CYCLE_NUMBA', '')})"


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
