import pytest


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def record(request):
    """Log one pass/fail line for an acceptance criterion; the summary prints them in order."""
    def _record(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:>2} [{status}] {title}: {detail}"
        request.config.acceptance_lines[number] = line
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.acceptance_lines
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
