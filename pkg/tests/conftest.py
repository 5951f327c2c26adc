import math

import pytest

MIDPOINTS = {
    "I": math.pi / 4,
    "II": 3 * math.pi / 4,
    "III": 5 * math.pi / 4,
    "IV": 7 * math.pi / 4,
}

UP = (1, 1, 1, 1)
DOWN = (-1, -1, -1, -1)
NEEL = (1, -1, 1, -1)


@pytest.fixture(params=sorted(MIDPOINTS))
def midpoint(request):
    return request.param, MIDPOINTS[request.param]


# ---------------------------------------------------------------------------
# acceptance reporting: tests marked ``acceptance(n)`` roll up into one line per criterion

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or report.when not in ("setup", "call"):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "tests": 0})
    if report.when == "call":
        entry["tests"] += 1
    if report.failed or (report.when == "setup" and report.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["ok"] and e["tests"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {e['title']} ({e['tests']} tests)")
