import re

_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    m = re.match(r"test_criterion_(\d+)", name)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call":
        _CRITERIA.setdefault(n, report.outcome == "passed")
        _CRITERIA[n] = _CRITERIA[n] and report.outcome == "passed"
    elif report.outcome == "failed":  # setup/teardown error
        _CRITERIA[n] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        verdict = "PASS" if _CRITERIA[n] else "FAIL"
        terminalreporter.write_line(f"[criterion {n}] {verdict}")
