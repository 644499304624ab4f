import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the per-criterion acceptance verdicts after the test run."""
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None) if mod else None
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)
