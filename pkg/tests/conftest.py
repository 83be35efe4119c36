"""Pytest configuration and shared fixtures."""

import os
import tempfile
from pathlib import Path

import pytest

from planning.parser import parse_domain, parse_problem
from tools.dpgc import load_dpgc

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def pytest_collection_modifyitems(config, items):
    """Skip tests marked ``slow`` unless PLANGEN_LONG_TESTS=1."""
    if os.getenv("PLANGEN_LONG_TESTS") == "1":
        return
    skip = pytest.mark.skip(reason="set PLANGEN_LONG_TESTS=1 to run full-scale tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def fixtures_dir():
    """Root of the shipped fixture files."""
    return FIXTURES


@pytest.fixture
def temp_dir():
    """Create a temporary directory removed after the test."""
    with tempfile.TemporaryDirectory() as tmp:
        yield Path(tmp)


@pytest.fixture(scope="session")
def ferry_domain_text():
    return (FIXTURES / "ferry" / "domain.pddl").read_text()


@pytest.fixture(scope="session")
def ferry_problem_text():
    return (FIXTURES / "ferry" / "problem.pddl").read_text()


@pytest.fixture(scope="session")
def ferry_domain(ferry_domain_text):
    """Parsed toy-ferry domain."""
    return parse_domain(ferry_domain_text)


@pytest.fixture(scope="session")
def ferry_problem(ferry_domain, ferry_problem_text):
    """c1 at l1, ferry at l1, goal (at c1 l2)."""
    return parse_problem(ferry_problem_text, ferry_domain)


@pytest.fixture(scope="session")
def ferry_plans():
    """Plan texts keyed by expected outcome."""
    directory = FIXTURES / "ferry"
    return {
        "valid": (directory / "plan_valid.txt").read_text(),
        "no_goal": (directory / "plan_no_goal.txt").read_text(),
        "precondition": (directory / "plan_precondition.txt").read_text(),
        "malformed": (directory / "plan_malformed.txt").read_text(),
    }


@pytest.fixture(scope="session")
def ferry_dpgc():
    return load_dpgc(FIXTURES / "ferry" / "dpgc.json")


@pytest.fixture(scope="session")
def gripper_domain():
    return parse_domain((FIXTURES / "gripper" / "domain.pddl").read_text())


@pytest.fixture(scope="session")
def gripper_problem(gripper_domain):
    return parse_problem((FIXTURES / "gripper" / "problem.pddl").read_text(), gripper_domain)


@pytest.fixture(scope="session")
def blocks_domain():
    return parse_domain((FIXTURES / "blocksworld" / "domain.pddl").read_text())


@pytest.fixture(scope="session")
def travel_domain():
    return parse_domain((FIXTURES / "travel" / "domain.pddl").read_text())


@pytest.fixture(scope="session")
def travel_problem(travel_domain):
    return parse_problem((FIXTURES / "travel" / "problem.pddl").read_text(), travel_domain)


@pytest.fixture(scope="session")
def toy_domains(ferry_domain, gripper_domain, blocks_domain):
    """(domain, dpgc) pairs of every shipped toy domain."""
    return [
        (ferry_domain, load_dpgc(FIXTURES / "ferry" / "dpgc.json")),
        (gripper_domain, load_dpgc(FIXTURES / "gripper" / "dpgc.json")),
        (blocks_domain, load_dpgc(FIXTURES / "blocksworld" / "dpgc.json")),
    ]
