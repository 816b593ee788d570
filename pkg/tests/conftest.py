"""Shared fixtures and the acceptance-suite summary.

Tests marked ``@pytest.mark.acceptance(number, title)`` get one summary line
each at the end of the run, with whatever detail they stored through the
``acceptance_detail`` fixture.
"""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "qcc",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qcc")

_DETAILS: dict[int, str] = {}
_OUTCOMES: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion with a summary line")


@pytest.fixture
def acceptance_detail(request):
    marker = request.node.get_closest_marker("acceptance")
    number = marker.args[0]

    def record(text: str) -> None:
        _DETAILS[number] = text

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args[0], marker.args[1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if report.passed and not hasattr(report, "wasxfail"):
            verdict = "PASS"
        elif hasattr(report, "wasxfail") and report.skipped:
            verdict = "FAIL (expected)"
        elif hasattr(report, "wasxfail"):
            verdict = "PASS (unexpected)"
        else:
            verdict = "FAIL"
        _OUTCOMES[number] = (verdict, title)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        verdict, title = _OUTCOMES[number]
        detail = _DETAILS.get(number, "")
        line = f"[{number:2d}] {verdict:<17} {title}"
        if detail:
            line += f" | {detail}"
        terminalreporter.write_line(line)
