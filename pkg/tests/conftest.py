"""Shared pytest hooks: collect the acceptance-criterion verdict lines and
print them in the terminal summary (they would otherwise be swallowed by
output capture)."""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
