"""Shared pytest plumbing: per-criterion acceptance summary.

Tests named test_criterion_<nn>_<label> (see test_acceptance.py) get one
PASS/FAIL line each in a dedicated terminal section, so the acceptance
status is readable without scanning the full test log.
"""

_PREFIX = "test_criterion_"
_outcomes = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith(_PREFIX):
        return
    if report.when == "call":
        _outcomes[name] = report.outcome
    elif report.outcome != "passed":
        # setup/teardown crash counts as a failure of the criterion
        _outcomes[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_outcomes):
        tag = name[len(_PREFIX):]
        num, _, label = tag.partition("_")
        status = "PASS" if _outcomes[name] == "passed" else "FAIL"
        terminalreporter.write_line(
            f"criterion {num} {status}  {label.replace('_', ' ')}"
        )
