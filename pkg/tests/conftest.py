import pytest

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one 'criterion N: PASS/FAIL ...' line per acceptance test."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
