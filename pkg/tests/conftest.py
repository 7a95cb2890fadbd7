import pytest

_results: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; returns ``ok`` so tests can assert on it."""
    def record(label: str, ok: bool, detail: str) -> bool:
        _results.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _results:
        terminalreporter.section("acceptance criteria")
        for line in _results:
            terminalreporter.write_line(line)
