import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])

# One line per acceptance criterion, echoed after the run even when
# stdout capture is on.  test_acceptance.py appends to this.
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
