import time

import pytest

SUITE_LIMIT = 300.0
_results = {}
_start = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    ok, _ = _results.get(number, (True, title))
    if rep.when == "call" or failed:
        _results[number] = (ok and not failed, title)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    elapsed = time.perf_counter() - _start
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        ok, title = _results[number]
        if number == 11:
            ok = ok and elapsed < SUITE_LIMIT
            title = f"{title} (suite {elapsed:.0f} s, limit {SUITE_LIMIT:.0f} s)"
        tr.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}")
