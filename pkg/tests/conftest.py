import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

# one line per acceptance criterion, filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def ex4_text():
    return (FIXTURES / "example_4_2.lenslab").read_text(encoding="utf-8")


@pytest.fixture(autouse=True)
def _no_budget_override(monkeypatch):
    monkeypatch.delenv("LENSLAB_BUDGET", raising=False)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
