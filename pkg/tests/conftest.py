"""Print one pass/fail line per acceptance criterion after the run."""

_results = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        props = dict(report.user_properties)
        _results[report.nodeid] = (props.get("criterion", report.nodeid),
                                   report.passed, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(_results.values(),
                                       key=lambda r: int(r[0].split()[0])):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {name}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
