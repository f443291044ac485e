import pytest

_acceptance_results = []
_acceptance_notes = []


@pytest.fixture
def acceptance_note():
    """Collects report lines that must survive output capture (printed in
    the terminal summary)."""
    return _acceptance_notes.append


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL':4s}  {name}")
    for note in _acceptance_notes:
        terminalreporter.write_line(note)
