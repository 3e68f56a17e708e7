import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # echo the acceptance verdicts after the normal report so they are
    # visible even when every test passed and capture swallowed the prints
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
