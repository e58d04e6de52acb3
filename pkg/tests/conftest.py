import pytest

ACCEPTANCE = []


@pytest.fixture
def record():
    """Record one acceptance line: record(number, label, passed, detail)."""
    def _record(number, label, passed, detail=""):
        ACCEPTANCE.append((number, label, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {label}  {detail}")
