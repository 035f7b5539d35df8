"""Shared test harness pieces.

Acceptance tests register one verdict line per criterion; they are echoed
after the run, outside pytest's output capture.
"""

CRITERION_LINES: list[str] = []


def record_criterion_line(line: str) -> None:
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
