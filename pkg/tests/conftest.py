import time

import pytest

ACCEPTANCE_LINES: list = []
SUITE_LIMIT_SECONDS = 60.0


def pytest_sessionstart(session):
    session.config._ctx_started = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    started = getattr(config, "_ctx_started", None)
    elapsed = time.perf_counter() - started if started else 0.0
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
        status = "PASS" if elapsed < SUITE_LIMIT_SECONDS else "FAIL"
        terminalreporter.write_line(f"[{status}] suite runtime {elapsed:.1f}s (limit {SUITE_LIMIT_SECONDS:.0f}s)")


def pytest_sessionfinish(session, exitstatus):
    started = getattr(session.config, "_ctx_started", None)
    if ACCEPTANCE_LINES and started and time.perf_counter() - started >= SUITE_LIMIT_SECONDS:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED
