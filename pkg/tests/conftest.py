import pytest

ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    """Register the outcome of an acceptance criterion for the terminal summary."""

    def _record(number, label, ok, detail=""):
        ACCEPTANCE[number] = (label, bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        label, ok, detail = ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {label}  {detail}")
