def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import REPORT_LINES

    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
