"""Collects the acceptance-criterion outcomes into one summary block."""

_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = _CRITERIA.get(report.nodeid)
    if mark is not None:
        mark["outcome"] = "PASS" if report.passed else "FAIL"


def pytest_collection_finish(session):
    for item in session.items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = {"number": m.args[0], "title": m.args[1], "outcome": "NOT RUN"}


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for entry in sorted(_CRITERIA.values(), key=lambda e: e["number"]):
        terminalreporter.write_line(f"criterion {entry['number']:>2}: {entry['outcome']:<7} {entry['title']}")
