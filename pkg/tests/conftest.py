import pytest

_LINES = []


@pytest.fixture
def report():
    """Record a one-line acceptance verdict; all lines print at the end of the run."""

    def add(label, ok, detail=""):
        verdict = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        line = f"[{verdict}] {label}" + (f": {detail}" if detail else "")
        _LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
