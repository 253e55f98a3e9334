import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_RESULTS = []


def record_criterion(number, name, ok, detail=""):
    _RESULTS.append((number, name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_RESULTS):
        terminalreporter.write_line(f"criterion {number} [{name}]: {'PASS' if ok else 'FAIL'}  {detail}")
