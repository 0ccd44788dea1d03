_lines = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _lines.extend(value for key, value in report.user_properties if key == "acceptance")


def pytest_terminal_summary(terminalreporter):
    if _lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
