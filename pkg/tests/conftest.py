import math
import time
from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parent.parent / "data"
LN10 = math.log(10)


@pytest.fixture
def data_dir() -> Path:
    return DATA


# Acceptance results, filled in by test_acceptance.py and printed at the end
# of the run: one PASS/FAIL line per criterion.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
SUITE_BUDGET = 30.0


def pytest_sessionstart(session):
    session.config._lgwb_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - config._lgwb_start
    results = dict(ACCEPTANCE)
    if 8 in results:
        ok, detail = results[8]
        results[8] = (ok and elapsed < SUITE_BUDGET, f"{detail}; suite runtime {elapsed:.1f} s (< {SUITE_BUDGET:.0f} s)")
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
