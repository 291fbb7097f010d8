import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
