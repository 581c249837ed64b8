"""Prints one PASS/FAIL line per acceptance criterion at the end of the run.

Acceptance tests carry ``@pytest.mark.criterion(number, "title")``; a
criterion with several tests passes only if all of them pass.
"""

from collections import OrderedDict

import pytest

_results: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = mark.args
        entry = _results.setdefault(number, {"title": title, "parts": []})
        detail = getattr(item, "criterion_detail", "")
        entry["parts"].append((item.name, rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        ok = all(outcome == "passed" for _, outcome, _ in entry["parts"])
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {entry['title']}")
        if len(entry["parts"]) > 1 or not ok or entry["parts"][0][2]:
            for name, outcome, detail in entry["parts"]:
                tr.write_line(f"         {outcome.upper():7s} {name}" + (f"  ({detail})" if detail else ""))
