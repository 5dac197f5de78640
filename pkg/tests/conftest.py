import pytest

_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; returns the flag."""

    def emit(number: int, title: str, ok: bool, elapsed: float, limit: float, **values) -> bool:
        ok = bool(ok) and elapsed < limit
        parts = "  ".join(f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}" for k, v in values.items())
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title:<44} {elapsed:6.2f}s/<{limit:g}s  {parts}"
        _LINES.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
