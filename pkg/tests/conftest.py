import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the terminal summary."""

    def record(number, passed, detail):
        _CRITERIA[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        passed, detail = _CRITERIA[n]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {n:2d}: {detail}")
