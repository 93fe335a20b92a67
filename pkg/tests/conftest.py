import pytest

from stableplan.fixtures import load_cplan, load_fixture, load_plan


@pytest.fixture
def fx():
    """Loader returning (instance, plan-or-None) for a shipped fixture."""

    def load(name, plan=None):
        inst = load_fixture(name)
        p = None
        if plan is not False:
            try:
                p = load_plan(plan or name)
            except FileNotFoundError:
                p = None
        return inst, p

    return load


@pytest.fixture
def cplan():
    return load_cplan


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
