"""VAL-equivalent plan validation with four-way failure classification."""

import logging
import subprocess
from dataclasses import dataclass
from enum import Enum
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from planning.errors import GroundingError, PddlError
from planning.model import Domain, Literal, Problem, TimedPlan
from planning.parser import parse_plan
from planning.semantics import (
    GroundAction,
    SatisfactionReport,
    apply,
    applicable,
    ground,
    initial_state,
    unsatisfied,
)

logger = logging.getLogger(__name__)


class Outcome(str, Enum):
    """Validation outcome; precedence Malformed > PreconditionFailure > ExecutableNoGoal > Valid."""

    VALID = "Valid"
    EXECUTABLE_NO_GOAL = "ExecutableNoGoal"
    PRECONDITION_FAILURE = "PreconditionFailure"
    MALFORMED = "Malformed"

    def __str__(self) -> str:
        return self.value


class InvalidInputs(Exception):
    """The domain and problem are not mutually consistent."""


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class StepRecord:
    index: int
    action: GroundAction
    pre_state_size: int
    satisfaction: SatisfactionReport


@dataclass(frozen=True)
class FailureDetail:
    """Earliest failing step with its violated literals, or the unsatisfied goal literals."""

    step: Optional[int] = None
    literals: tuple[Literal, ...] = ()
    message: str = ""


@dataclass(frozen=True)
class ValidationReport:
    outcome: Outcome
    trace: tuple[StepRecord, ...] = ()
    failure: Optional[FailureDetail] = None
    final_cost: int = 0
    plan_length: int = 0
    terminated: bool = False
    revisited_states: int = 0

    @property
    def is_valid(self) -> bool:
        return self.outcome is Outcome.VALID

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "outcome": self.outcome.value,
            "plan_length": self.plan_length,
            "steps_executed": len(self.trace),
            "final_cost": self.final_cost,
            "terminated": self.terminated,
            "revisited_states": self.revisited_states,
        }
        if self.failure is not None:
            result["failure"] = {
                "step": self.failure.step,
                "literals": [str(lit) for lit in self.failure.literals],
                "message": self.failure.message,
            }
        return result


class PlanValidator:
    """
    Validates plans against one (domain, problem) pair.

    Construct once and call ``validate`` many times when scoring a group of
    candidates for the same problem.
    """

    def __init__(self, domain: Domain, problem: Problem):
        check_inputs(domain, problem)
        self.domain = domain
        self.problem = problem
        self._initial = initial_state(problem)

    def validate(self, plan_text: Union[str, bytes]) -> ValidationReport:
        try:
            plan = parse_plan(plan_text)
        except PddlError as e:
            return ValidationReport(Outcome.MALFORMED, failure=FailureDetail(message=str(e)))
        return self.validate_plan(plan)

    def validate_plan(self, plan: TimedPlan) -> ValidationReport:
        """
        Execute ``plan`` from the initial state.

        All steps are grounded before execution so that a malformed step
        anywhere in the plan outranks an earlier precondition failure.
        """
        grounded: list[GroundAction] = []
        for index, step in enumerate(plan.steps, start=1):
            try:
                grounded.append(ground(self.domain, self.problem, step.action, step.args))
            except GroundingError as e:
                return ValidationReport(
                    Outcome.MALFORMED,
                    failure=FailureDetail(step=index, message=str(e)),
                    plan_length=len(plan),
                    terminated=plan.terminated,
                )

        state = self._initial
        visited = {state.atoms}
        revisits = 0
        trace: list[StepRecord] = []
        for index, action in enumerate(grounded, start=1):
            report = applicable(state, action)
            trace.append(StepRecord(index, action, len(state), report))
            if not report.satisfied:
                return ValidationReport(
                    Outcome.PRECONDITION_FAILURE,
                    trace=tuple(trace),
                    failure=FailureDetail(step=index, literals=report.violated),
                    final_cost=state.cost,
                    plan_length=len(plan),
                    terminated=plan.terminated,
                    revisited_states=revisits,
                )
            state = apply(state, action)
            if state.atoms in visited:
                revisits += 1
            visited.add(state.atoms)

        missing = unsatisfied(state, self.problem.goal)
        outcome = Outcome.EXECUTABLE_NO_GOAL if missing else Outcome.VALID
        return ValidationReport(
            outcome,
            trace=tuple(trace),
            failure=FailureDetail(literals=missing) if missing else None,
            final_cost=state.cost,
            plan_length=len(plan),
            terminated=plan.terminated,
            revisited_states=revisits,
        )


def check_inputs(domain: Domain, problem: Problem) -> None:
    """
    Raise InvalidInputs when ``problem`` does not type-check against ``domain``.

    Only reachable through hand-built models; parsed problems already satisfy this.
    """
    for obj in problem.objects:
        if obj.type not in domain.type_names:
            raise InvalidInputs(f"object {obj.name} has type {obj.type} unknown to {domain.name}")
    atoms = list(problem.init) + [lit.atom for lit in problem.goal if not lit.atom.is_equality]
    for atom in atoms:
        signature = domain.get_predicate(atom.predicate)
        if signature is None or signature.arity != len(atom.args):
            raise InvalidInputs(f"{atom} does not match any predicate of {domain.name}")


def validate(domain: Domain, problem: Problem, plan_text: Union[str, bytes]) -> ValidationReport:
    return PlanValidator(domain, problem).validate(plan_text)


def validate_plan(domain: Domain, problem: Problem, plan: TimedPlan) -> ValidationReport:
    return PlanValidator(domain, problem).validate_plan(plan)


def percentage(part: int, whole: int) -> float:
    """
    ``100 * part / whole`` rounded half up to one decimal place, so 1 of 16 is 6.3.

    Raises:
        ZeroDivisionError: When ``whole`` is 0
    """
    exact = Decimal(100 * part) / Decimal(whole)
    return float(exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def valid_plan_rate(cases: Sequence[tuple[Domain, Problem, str]]) -> float:
    """
    Percentage of plans classified Valid, to one decimal place.

    Raises:
        EmptyInput: When ``cases`` is empty
    """
    if not cases:
        raise EmptyInput("valid plan rate of an empty case list")
    valid = sum(1 for d, p, text in cases if validate(d, p, text).is_valid)
    return percentage(valid, len(cases))


def format_report(report: ValidationReport, verbose: bool = False) -> str:
    """Stable line-oriented rendering used by ``plangen validate``."""
    lines = [report.outcome.value]
    if not verbose:
        return lines[0]
    for record in report.trace:
        status = "ok" if record.satisfaction.satisfied else "FAILED"
        lines.append(
            f"step {record.index}: {record.action} {status} (state size {record.pre_state_size})"
        )
    failure = report.failure
    if failure is not None:
        literals = " ".join(str(lit) for lit in failure.literals)
        if report.outcome is Outcome.PRECONDITION_FAILURE:
            lines.append(f"failure: step {failure.step} violated {literals}")
        elif report.outcome is Outcome.EXECUTABLE_NO_GOAL:
            lines.append(f"failure: unsatisfied goal {literals}")
        else:
            where = f"step {failure.step}: " if failure.step is not None else ""
            lines.append(f"failure: {where}{failure.message}")
    if report.revisited_states:
        lines.append(f"revisited states: {report.revisited_states}")
    lines.append(f"cost: {report.final_cost}")
    return "\n".join(lines)


# VAL's verbose output phrases, checked in precedence order
_VAL_PATTERNS = (
    (Outcome.MALFORMED, ("error:", "bad operator", "type-checking", "errors encountered")),
    (Outcome.PRECONDITION_FAILURE, ("plan failed to execute", "unsatisfied precondition")),
    (Outcome.EXECUTABLE_NO_GOAL, ("goal not satisfied",)),
    (Outcome.VALID, ("plan valid", "successful plans")),
)


def classify_val_output(text: str) -> Outcome:
    lowered = text.lower()
    for outcome, phrases in _VAL_PATTERNS:
        if any(phrase in lowered for phrase in phrases):
            return outcome
    return Outcome.MALFORMED


def val_cross_check(
    val_binary: Union[str, Path],
    domain_file: Union[str, Path],
    problem_file: Union[str, Path],
    plan_file: Union[str, Path],
    timeout: float = 60.0,
) -> Outcome:
    """
    Run a real VAL binary in verbose mode and map its verdict to an Outcome.

    Raises:
        OSError: When the binary cannot be started
        subprocess.TimeoutExpired: When VAL exceeds ``timeout``
    """
    command = [str(val_binary), "-v", str(domain_file), str(problem_file), str(plan_file)]
    logger.debug("Running VAL: %s", command)
    completed = subprocess.run(command, capture_output=True, text=True, timeout=timeout)
    return classify_val_output(completed.stdout + "\n" + completed.stderr)


__all__ = [
    "Outcome",
    "StepRecord",
    "FailureDetail",
    "ValidationReport",
    "PlanValidator",
    "InvalidInputs",
    "EmptyInput",
    "validate",
    "validate_plan",
    "percentage",
    "valid_plan_rate",
    "format_report",
    "val_cross_check",
    "classify_val_output",
]
