from importlib.resources import files
from pathlib import Path

import pytest

from planvent.evaluation import EvaluationContext
from planvent.plan import load_plan, load_program
from planvent.weather import parse_epw

DATA = Path(__file__).parent / "data"
EPW = files("planvent") / "data/porto_synthetic.epw"
PROGRAM = files("planvent") / "data/case_study_program.json"


@pytest.fixture(scope="session")
def weather():
    return parse_epw(EPW)


@pytest.fixture(scope="session")
def context(weather):
    return EvaluationContext(weather)


@pytest.fixture(scope="session")
def program():
    return load_program(PROGRAM)


@pytest.fixture(scope="session")
def plan_a():
    return load_plan(DATA / "plan_a.json")


@pytest.fixture(scope="session")
def plan_b():
    return load_plan(DATA / "plan_b.json")


HERE = Path(__file__).parent

#: criterion number -> result line, filled by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
