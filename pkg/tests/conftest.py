from __future__ import annotations

import pytest

_RESULTS: list = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and rep.when == "call":
        n, title = mark.args
        _RESULTS.append((n, title, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, secs in sorted(_RESULTS):
        terminalreporter.write_line(
            f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f}s)")
