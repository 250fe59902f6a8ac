import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = _CRITERION.search(item.name)
    if not m or report.when != "call" and report.passed:
        return
    num = int(m.group(1))
    status = "PASS" if report.passed else "FAIL"
    if _results.get(num, ("PASS",))[0] == "FAIL":
        return
    _results[num] = (status, (item.function.__doc__ or item.name).strip().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        status, title = _results[num]
        terminalreporter.write_line(f"[{status}] criterion {num:2d}: {title}")
    passed = sum(s == "PASS" for s, _ in _results.values())
    terminalreporter.write_line(f"{passed}/{len(_results)} criteria passed")
