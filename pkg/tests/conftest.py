"""Shared test plumbing: collect acceptance PASS/FAIL lines for the summary.

Passing tests' stdout is captured by pytest, so the acceptance module also
records its one-line verdicts here and a terminal-summary hook prints them
at the end of every run.
"""

_acceptance_lines = []


def record_acceptance_line(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
