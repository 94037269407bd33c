import pytest

from hecke_bounds.empirical import delta_coefficients, second_form_coefficients

SCAN_LIMIT = 100_000


@pytest.fixture(scope="session")
def delta_table():
    return delta_coefficients(SCAN_LIMIT)


@pytest.fixture(scope="session")
def weight16_table():
    return second_form_coefficients(SCAN_LIMIT)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_criterion():
    """Record one PASS/FAIL line; the lines are echoed in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
