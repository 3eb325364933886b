"""Prints a PASS/FAIL line per acceptance criterion after the run."""
import re

_DESCRIPTIONS: dict[str, str] = {}
_OUTCOMES: dict[str, str] = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_collection_modifyitems(items):
    for item in items:
        if _CRITERION.search(item.nodeid):
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _DESCRIPTIONS[item.nodeid] = doc


def pytest_runtest_logreport(report):
    if report.nodeid not in _DESCRIPTIONS:
        return
    if report.failed:
        _OUTCOMES[report.nodeid] = "FAIL"
    elif report.skipped:
        _OUTCOMES.setdefault(report.nodeid, "SKIP")
    elif report.when == "call":
        _OUTCOMES.setdefault(report.nodeid, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_OUTCOMES, key=lambda n: int(_CRITERION.search(n).group(1))):
        number = int(_CRITERION.search(nodeid).group(1))
        terminalreporter.write_line(
            f"criterion {number:>2}: {_OUTCOMES[nodeid]}  {_DESCRIPTIONS[nodeid]}")
