"""Tests for the external planner adapter."""

import sys

import pytest

from tools.external import (
    ConversionFailure,
    ExternalFailure,
    ExternalSolver,
    InvalidExternalPlan,
    _build_command,
    convert_output,
)
from tools.planner import Unsolved

FAKE_PLANNER = """
import sys, time
mode = sys.argv[1]
plan_file = sys.argv[4]
if mode == "sleep":
    time.sleep(30)
if mode == "fail":
    sys.exit(3)
if mode == "stdout":
    print("search started")
    print("board c1 l1 ignored")
    print("(board c1 l1)")
    print("(sail l1 l2)")
    print("(debark c1 l2)")
    sys.exit(0)
lines = ["(board c1 l1)"] if mode == "short" else ["(board c1 l1)", "(sail l1 l2)", "(debark c1 l2)"]
with open(plan_file, "w") as handle:
    handle.write("\\n".join(f"{i}.000: {a} [1]" for i, a in enumerate(lines)) + "\\n; cost = 3\\n")
"""


@pytest.fixture
def fake_planner(temp_dir):
    """Command template running a scripted planner in the given mode."""
    script = temp_dir / "fake_planner.py"
    script.write_text(FAKE_PLANNER)

    def template(mode: str) -> str:
        return f"{sys.executable} {script} {mode} {{domain}} {{problem}} {{plan}}"

    return template


class TestConvertOutput:
    """Tests for convert_output."""

    def test_timed_lines(self):
        plan = convert_output("0.000: (board c1 l1) [1.000]\n1.000: (sail l1 l2) [1.000]\n")
        assert plan.actions == [("board", ("c1", "l1")), ("sail", ("l1", "l2"))]
        assert [s.timestamp for s in plan.steps] == [1, 2]
        assert plan.terminated

    def test_bare_lines_and_log_noise(self):
        plan = convert_output("Solution found!\n(BOARD C1 L1)\n; cost = 1 (unit cost)\n")
        assert plan.actions == [("board", ("c1", "l1"))]

    def test_end_marker_skipped(self):
        plan = convert_output("1: (board c1 l1)\nEND\n")
        assert len(plan) == 1

    def test_broken_action_line(self):
        with pytest.raises(ConversionFailure):
            convert_output("(board c1 (l1))")

    def test_empty_output(self):
        assert len(convert_output("")) == 0


class TestExternalSolver:
    """Tests for ExternalSolver with a scripted planner."""

    def test_template_needs_placeholders(self):
        with pytest.raises(ValueError):
            ExternalSolver("planner --go")

    def test_planner_id(self, fake_planner):
        assert ExternalSolver(fake_planner("ok")).planner_id == f"external:{sys.executable}"

    def test_plan_file(self, fake_planner, ferry_domain, ferry_problem):
        plan = ExternalSolver(fake_planner("ok")).solve(ferry_domain, ferry_problem)
        assert len(plan) == 3

    def test_plan_from_stdout(self, fake_planner, ferry_domain, ferry_problem):
        plan = ExternalSolver(fake_planner("stdout")).solve(ferry_domain, ferry_problem)
        assert plan.actions[0] == ("board", ("c1", "l1"))

    def test_invalid_plan(self, fake_planner, ferry_domain, ferry_problem):
        with pytest.raises(InvalidExternalPlan) as info:
            ExternalSolver(fake_planner("short")).solve(ferry_domain, ferry_problem)
        assert info.value.report.outcome.value == "ExecutableNoGoal"

    def test_nonzero_exit(self, fake_planner, ferry_domain, ferry_problem):
        with pytest.raises(ExternalFailure):
            ExternalSolver(fake_planner("fail")).solve(ferry_domain, ferry_problem)

    def test_timeout_is_budget(self, fake_planner, ferry_domain, ferry_problem):
        result = ExternalSolver(fake_planner("sleep"), timeout=0.5).solve(ferry_domain, ferry_problem)
        assert isinstance(result, Unsolved)
        assert result.reason == "budget"

    def test_other_braces_pass_through(self, fake_planner, ferry_domain, ferry_problem):
        """Planner options with their own braces reach the planner untouched."""
        template = fake_planner("ok") + " --search={unused} --opts={'depth':2}"
        assert len(ExternalSolver(template).solve(ferry_domain, ferry_problem)) == 3


class TestBuildCommand:
    """Tests for command template substitution."""

    def test_known_placeholders_only(self):
        command = _build_command(
            "planner {domain} {problem} --out={plan} --h={ff}",
            {"domain": "d.pddl", "problem": "p.pddl", "plan": "plan.txt"},
        )
        assert command == ["planner", "d.pddl", "p.pddl", "--out=plan.txt", "--h={ff}"]

    def test_placeholder_inside_argument(self):
        command = _build_command("planner --files={domain},{problem}", {"domain": "d", "problem": "p"})
        assert command == ["planner", "--files=d,p"]
