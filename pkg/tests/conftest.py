import re

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        m = re.search(r"test_criterion_(\d+)", report.nodeid)
        if m:
            k = int(m.group(1))
            # parametrized criteria pass only if every case passes
            if _ACCEPTANCE.get(k, "passed") == "passed":
                _ACCEPTANCE[k] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[k] == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {k}: {CRITERIA[k]}")
