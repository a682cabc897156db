import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
os.environ.setdefault("HEUN_THREADS", "1")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
