from pathlib import Path

import pytest

from formabench.bench import bundled_domain
from formabench.pddl import parse_domain, parse_problem

FIXTURES = Path(__file__).parent / "fixtures"

SUSSMAN_PLAN = ["(unstack c a)", "(put-down c)", "(pick-up b)",
                "(stack b c)", "(pick-up a)", "(stack a b)"]

_criteria: list[str] = []


@pytest.fixture(scope="session")
def domain():
    return parse_domain(bundled_domain())


@pytest.fixture(scope="session")
def sussman_text():
    return (FIXTURES / "sussman.pddl").read_text()


@pytest.fixture(scope="session")
def sussman(domain, sussman_text):
    return parse_problem(sussman_text, domain)


@pytest.fixture
def criterion():
    """Report one PASS/FAIL line for an acceptance criterion."""
    def report(label: str, passed: bool, detail: str = ""):
        line = f"{'PASS' if passed else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        _criteria.append(line)
        print(line)
        assert passed, line
    return report


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in _criteria:
            terminalreporter.write_line(line)
