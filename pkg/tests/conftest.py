import time

import pytest

ACCEPTANCE = []  # (criterion, passed, detail)
FULL_SUITE_LIMIT_S = 60.0
_start = time.perf_counter()


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((criterion, bool(passed), detail))


@pytest.fixture
def acceptance():
    return record


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _start
    session.config._qwlab_elapsed = elapsed
    if ACCEPTANCE and elapsed >= FULL_SUITE_LIMIT_S:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit, ok, detail in ACCEPTANCE:
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {crit}: {detail}")
    elapsed = getattr(config, "_qwlab_elapsed", time.perf_counter() - _start)
    ok = elapsed < FULL_SUITE_LIMIT_S
    tr.write_line(f"[{'PASS' if ok else 'FAIL'}] 9b full suite wall-clock: {elapsed:.1f} s (limit {FULL_SUITE_LIMIT_S:.0f} s)")
