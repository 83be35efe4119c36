"""Tests for plan validation and outcome classification."""

import os
import random
from collections import Counter

import pytest

from planning.model import TimedPlan
from planning.parser import parse_plan
from tools.validator import (
    EmptyInput,
    Outcome,
    PlanValidator,
    classify_val_output,
    format_report,
    percentage,
    val_cross_check,
    valid_plan_rate,
    validate,
    validate_plan,
)
from tests.randomized import (
    MUTATIONS,
    naive_outcome,
    random_case,
    random_plan,
    random_task,
    random_walk,
)


class TestOutcomes:
    """The four outcomes on the ferry fixtures."""

    @pytest.mark.parametrize(
        "key, expected",
        [
            ("valid", Outcome.VALID),
            ("no_goal", Outcome.EXECUTABLE_NO_GOAL),
            ("precondition", Outcome.PRECONDITION_FAILURE),
            ("malformed", Outcome.MALFORMED),
        ],
    )
    def test_fixture_outcomes(self, ferry_domain, ferry_problem, ferry_plans, key, expected):
        assert validate(ferry_domain, ferry_problem, ferry_plans[key]).outcome is expected

    def test_precondition_failure_detail(self, ferry_domain, ferry_problem, ferry_plans):
        """sail then board: step 2 needs (ferry-at l1)."""
        report = validate(ferry_domain, ferry_problem, ferry_plans["precondition"])
        assert report.failure.step == 2
        assert [str(lit) for lit in report.failure.literals] == ["(ferry-at l1)"]
        assert len(report.trace) == 2

    def test_no_goal_lists_unsatisfied(self, ferry_domain, ferry_problem, ferry_plans):
        report = validate(ferry_domain, ferry_problem, ferry_plans["no_goal"])
        assert [str(lit) for lit in report.failure.literals] == ["(at c1 l2)"]

    def test_malformed_outranks_precondition(self, ferry_domain, ferry_problem):
        """A bad step after an inapplicable one still makes the plan Malformed."""
        text = "1: (debark c1 l2)\n2: (fly c1)\nEND"
        report = validate(ferry_domain, ferry_problem, text)
        assert report.outcome is Outcome.MALFORMED
        assert report.failure.step == 2

    def test_type_error_is_malformed(self, ferry_domain, ferry_problem):
        report = validate(ferry_domain, ferry_problem, "1: (board l1 l1)")
        assert report.outcome is Outcome.MALFORMED

    def test_empty_plan_without_goal(self, ferry_domain, ferry_problem):
        """The empty plan is executable but leaves the goal unsatisfied."""
        report = validate(ferry_domain, ferry_problem, "")
        assert report.outcome is Outcome.EXECUTABLE_NO_GOAL

    def test_final_cost(self, travel_domain, travel_problem, fixtures_dir):
        text = (fixtures_dir / "travel" / "plan_valid.txt").read_text()
        report = validate(travel_domain, travel_problem, text)
        assert report.is_valid
        assert report.final_cost == 5

    def test_revisited_states(self, ferry_domain, ferry_problem):
        """Sailing there and back returns to a visited state."""
        text = "1: (sail l1 l2)\n2: (sail l2 l1)\nEND"
        report = validate(ferry_domain, ferry_problem, text)
        assert report.revisited_states == 1

    def test_validator_reused(self, ferry_domain, ferry_problem, ferry_plans):
        validator = PlanValidator(ferry_domain, ferry_problem)
        outcomes = [validator.validate(ferry_plans[k]).outcome for k in ("valid", "no_goal")]
        assert outcomes == [Outcome.VALID, Outcome.EXECUTABLE_NO_GOAL]

    def test_to_dict(self, ferry_domain, ferry_problem, ferry_plans):
        data = validate(ferry_domain, ferry_problem, ferry_plans["precondition"]).to_dict()
        assert data["outcome"] == "PreconditionFailure"
        assert data["failure"]["step"] == 2


class TestAgainstReference:
    """Randomised plans agree with a naive reference executor."""

    @pytest.mark.parametrize("seed", range(20))
    def test_random_plans(self, gripper_domain, gripper_problem, seed):
        plan = random_plan(gripper_domain, gripper_problem, length=1 + seed % 5, seed=seed)
        report = PlanValidator(gripper_domain, gripper_problem).validate_plan(plan)
        assert report.outcome.value == naive_outcome(gripper_domain, gripper_problem, plan)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_walks(self, gripper_domain, gripper_problem, seed):
        """Executable walks are never PreconditionFailure or Malformed."""
        plan = random_walk(gripper_domain, gripper_problem, length=8, seed=seed)
        report = PlanValidator(gripper_domain, gripper_problem).validate_plan(plan)
        assert report.outcome in (Outcome.VALID, Outcome.EXECUTABLE_NO_GOAL)
        assert report.outcome.value == naive_outcome(gripper_domain, gripper_problem, plan)

    def test_prefix_of_valid_plan(self, ferry_domain, ferry_problem, ferry_plans):
        """Every strict prefix of the valid ferry plan misses the goal."""
        full = parse_plan(ferry_plans["valid"])
        for k in range(len(full)):
            prefix = TimedPlan(full.steps[:k], terminated=True)
            report = PlanValidator(ferry_domain, ferry_problem).validate_plan(prefix)
            assert report.outcome is Outcome.EXECUTABLE_NO_GOAL


class TestRandomDomains:
    """Random typed domains and mutated plans agree with the reference executor."""

    @pytest.mark.parametrize("seed", range(40))
    def test_random_cases(self, seed):
        domain, problem, plan = random_case(seed)
        assert validate_plan(domain, problem, plan).outcome.value == naive_outcome(domain, problem, plan)

    @pytest.mark.parametrize("mutation", MUTATIONS, ids=lambda m: m.__name__)
    def test_each_mutation(self, mutation):
        """Every mutation of a walked plan is classified like the reference does."""
        rng = random.Random(mutation.__name__)
        for seed in range(25):
            domain, problem = random_task(seed)
            plan = mutation(random_walk(domain, problem, 4, seed), rng)
            assert validate_plan(domain, problem, plan).outcome.value == naive_outcome(domain, problem, plan)

    def test_task_bounds(self):
        for seed in range(50):
            domain, problem = random_task(seed)
            assert 1 <= len(domain.actions) <= 3
            assert 1 <= len(problem.objects) <= 6

    @pytest.mark.slow
    def test_thousands_of_cases(self):
        """At least 1,000 random cases agree and every outcome shows up."""
        seen = Counter()
        for seed in range(1_500):
            domain, problem, plan = random_case(seed)
            expected = naive_outcome(domain, problem, plan)
            assert validate_plan(domain, problem, plan).outcome.value == expected, f"seed {seed}"
            seen[expected] += 1
        assert set(seen) == {o.value for o in Outcome}


class TestValidPlanRate:
    """Tests for valid_plan_rate."""

    def test_rate(self, ferry_domain, ferry_problem, ferry_plans):
        cases = [(ferry_domain, ferry_problem, text) for text in ferry_plans.values()]
        assert valid_plan_rate(cases) == 25.0

    def test_one_decimal(self, ferry_domain, ferry_problem, ferry_plans):
        cases = [(ferry_domain, ferry_problem, ferry_plans["valid"])]
        cases += [(ferry_domain, ferry_problem, ferry_plans["malformed"])] * 2
        assert valid_plan_rate(cases) == 33.3

    def test_rounds_half_up(self, ferry_domain, ferry_problem, ferry_plans):
        """1 valid of 16 is 6.25%, reported as 6.3 rather than banker's 6.2."""
        cases = [(ferry_domain, ferry_problem, ferry_plans["valid"])]
        cases += [(ferry_domain, ferry_problem, ferry_plans["no_goal"])] * 15
        assert valid_plan_rate(cases) == 6.3

    @pytest.mark.parametrize(
        "part, whole, expected",
        [(1, 16, 6.3), (3, 16, 18.8), (1, 8, 12.5), (1, 3, 33.3), (2, 3, 66.7), (0, 5, 0.0), (7, 7, 100.0)],
    )
    def test_percentage(self, part, whole, expected):
        assert percentage(part, whole) == expected

    def test_empty(self):
        with pytest.raises(EmptyInput):
            valid_plan_rate([])


class TestFormatReport:
    """Tests for format_report."""

    def test_terse(self, ferry_domain, ferry_problem, ferry_plans):
        report = validate(ferry_domain, ferry_problem, ferry_plans["valid"])
        assert format_report(report) == "Valid"

    def test_verbose_failure(self, ferry_domain, ferry_problem, ferry_plans):
        report = validate(ferry_domain, ferry_problem, ferry_plans["precondition"])
        lines = format_report(report, verbose=True).splitlines()
        assert lines[0] == "PreconditionFailure"
        assert "failure: step 2 violated (ferry-at l1)" in lines
        assert lines[-1] == "cost: 0"


class TestValCrossCheck:
    """Tests for the external VAL comparison."""

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("Plan executed successfully - checking goal\nPlan valid", Outcome.VALID),
            ("Goal not satisfied\nPlan invalid", Outcome.EXECUTABLE_NO_GOAL),
            ("Plan failed to execute", Outcome.PRECONDITION_FAILURE),
            ("Errors encountered in plan", Outcome.MALFORMED),
            ("", Outcome.MALFORMED),
        ],
    )
    def test_classify_output(self, text, expected):
        assert classify_val_output(text) is expected

    @pytest.mark.skipif(not os.getenv("PLANGEN_VAL"), reason="PLANGEN_VAL not set")
    @pytest.mark.parametrize("key", ["valid", "no_goal", "precondition"])
    def test_agrees_with_val(self, fixtures_dir, ferry_domain, ferry_problem, ferry_plans, key):
        ferry = fixtures_dir / "ferry"
        plan_file = ferry / {"valid": "plan_valid.txt", "no_goal": "plan_no_goal.txt",
                             "precondition": "plan_precondition.txt"}[key]
        ours = validate(ferry_domain, ferry_problem, ferry_plans[key]).outcome
        theirs = val_cross_check(os.environ["PLANGEN_VAL"], ferry / "domain.pddl",
                                 ferry / "problem.pddl", plan_file)
        assert ours is theirs
