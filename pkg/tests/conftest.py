import pytest

from berge_lab.hypercore import validate
from oracles import FANO

# filled by test_acceptance.py; one entry per criterion
ACCEPTANCE: dict = {}


@pytest.fixture
def fano():
    return validate(FANO, 7, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"AC{key}: {'PASS' if ok else 'FAIL'}  {detail}")
