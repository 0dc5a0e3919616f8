acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    # replay the acceptance verdict lines after the run so they are visible
    # even though pytest captures stdout during the tests themselves
    if acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
