"""Collects acceptance outcomes and prints one line per criterion at the end."""

_OUTCOMES: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, title = mark.args
            _OUTCOMES.setdefault(n, {"title": title, "status": "NOT RUN", "seconds": 0.0, "node": item.nodeid})


def pytest_runtest_logreport(report):
    entry = next((e for e in _OUTCOMES.values() if e["node"] == report.nodeid), None)
    if entry is None:
        return
    entry["seconds"] += report.duration
    if report.failed:
        entry["status"] = "FAIL"
    elif report.when == "call" and entry["status"] != "FAIL":
        entry["status"] = "PASS" if report.passed else "SKIPPED"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        e = _OUTCOMES[n]
        terminalreporter.write_line(f"criterion {n:2d}: {e['status']:7s} {e['title']} ({e['seconds']:.1f} s)")
