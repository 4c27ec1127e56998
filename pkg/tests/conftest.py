import pytest

from grcsim.types import SaturationLimits


@pytest.fixture
def pmsm_limits():
    return [SaturationLimits(-50, 50), SaturationLimits(-300, 300), SaturationLimits(-300, 300)]


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance result line; all lines are printed in the terminal summary."""

    def _report(number: int, ok: bool, detail: str, elapsed: float, budget: float) -> bool:
        ok = ok and elapsed < budget
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f} s, budget {budget:g} s]"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
