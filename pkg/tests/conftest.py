"""Shared pytest plumbing: one summary line per acceptance check.

Tests marked ``@pytest.mark.acceptance(num, description)`` get a final
"ACCEPTANCE <num>: PASS/FAIL - <description>" line in the terminal
summary so the end-to-end verdicts are readable at a glance without
digging through the per-test log.
"""

import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, description): end-to-end acceptance check with a summary line",
    )
    config._acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num, description = marker.args
    if report.when == "call":
        item.config._acceptance_results[num] = (description, report.passed)
    elif report.when == "setup" and report.failed:
        # A broken fixture still deserves a verdict line.
        item.config._acceptance_results[num] = (description, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance")
    for num in sorted(results):
        description, passed = results[num]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {num}: {verdict} - {description}")
