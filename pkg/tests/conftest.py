import pytest

from welltris import klee

BACKENDS = ["python"] + (["cython"] if klee.BACKEND == "cython" else [])

_acceptance_lines: list[str] = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _report(criterion: str, ok: bool, detail: str):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        print(_acceptance_lines[-1])
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
