"""Adapter for external planners with output-format conversion."""

import logging
import re
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Optional, Union

from planning.model import Domain, Problem, TimedPlan
from planning.parser import parse_domain, parse_problem
from planning.render import render_domain, render_problem
from tools.planner import SolveResult, Unsolved
from tools.validator import Outcome, ValidationReport, validate_plan
from utils.identifiers import is_name

logger = logging.getLogger(__name__)


class ExternalFailure(Exception):
    """The planner exited non-zero or timed out."""

    def __init__(self, message: str, stderr: str = "", timed_out: bool = False):
        self.stderr = stderr
        self.timed_out = timed_out
        super().__init__(message)

    def __reduce__(self):
        return (ExternalFailure, (self.args[0], self.stderr, self.timed_out))


class ConversionFailure(Exception):
    """Planner output could not be turned into a plan."""


class InvalidExternalPlan(Exception):
    """The converted plan does not validate."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"external plan is {report.outcome}")

    def __reduce__(self):
        return (InvalidExternalPlan, (self.report,))


# "0: (a b)" as written by VAL-style planners, optionally "0.000: (a b) [1.000]"
_TIMED_LINE_RE = re.compile(r"^\d+(?:\.\d+)?\s*:\s*(\([^()]*\))\s*(?:\[[^\]]*\])?$")
_BARE_LINE_RE = re.compile(r"^(\([^()]*\))$")

SAS_PLAN = "sas_plan"


def convert_output(text: str) -> TimedPlan:
    """
    Convert planner output into a terminated TimedPlan with step-index timestamps.

    Accepts VAL-format lines and bare ``(action args)`` lines; lines that start
    with neither a digit-and-colon nor ``(`` are treated as planner log output.

    Raises:
        ConversionFailure: An action line that cannot form a plan step
    """
    actions = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line or line.upper() == "END":
            continue
        match = _TIMED_LINE_RE.match(line) or _BARE_LINE_RE.match(line)
        if match is None:
            if line.startswith("(") or re.match(r"^\d+(\.\d+)?\s*:", line):
                raise ConversionFailure(f"line {line_number}: cannot convert {raw.strip()!r}")
            continue
        tokens = match.group(1)[1:-1].lower().split()
        if not tokens or not all(is_name(t) for t in tokens):
            raise ConversionFailure(f"line {line_number}: illegal action {raw.strip()!r}")
        actions.append((tokens[0], tuple(tokens[1:])))
    return TimedPlan.from_actions(actions)


def _build_command(template: str, substitutions: dict[str, str]) -> list[str]:
    if "{domain}" not in template or "{problem}" not in template:
        raise ValueError("command template needs {domain} and {problem} placeholders")
    command = []
    for part in shlex.split(template):
        # Only the known placeholders are replaced; other braces pass through.
        for key, value in substitutions.items():
            part = part.replace("{" + key + "}", value)
        command.append(part)
    return command


def external_solve(
    command_template: str,
    domain_file: Union[str, Path],
    problem_file: Union[str, Path],
    timeout: float,
    domain: Optional[Domain] = None,
    problem: Optional[Problem] = None,
) -> TimedPlan:
    """
    Run an external planner and return its validated plan.

    Args:
        command_template: Command line with ``{domain}``, ``{problem}`` and optional ``{plan}``
        domain_file: Domain path handed to the planner
        problem_file: Problem path handed to the planner
        timeout: Seconds before the planner is killed
        domain: Parsed domain (parsed from ``domain_file`` when omitted)
        problem: Parsed problem (parsed from ``problem_file`` when omitted)

    Raises:
        ExternalFailure, ConversionFailure, InvalidExternalPlan
    """
    domain_file = Path(domain_file).resolve()
    problem_file = Path(problem_file).resolve()
    if domain is None:
        domain = parse_domain(domain_file.read_text(encoding="utf-8"))
    if problem is None:
        problem = parse_problem(problem_file.read_text(encoding="utf-8"), domain)

    with tempfile.TemporaryDirectory(prefix="plangen-planner-") as workdir:
        plan_file = Path(workdir) / "plan.txt"
        command = _build_command(
            command_template,
            {"domain": str(domain_file), "problem": str(problem_file), "plan": str(plan_file)},
        )
        logger.debug("Running external planner: %s", command)
        try:
            completed = subprocess.run(
                command, cwd=workdir, capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired as e:
            stderr = e.stderr.decode() if isinstance(e.stderr, bytes) else (e.stderr or "")
            raise ExternalFailure(f"planner timed out after {timeout}s", stderr, True) from None
        except OSError as e:
            raise ExternalFailure(f"cannot start planner: {e}") from None

        if completed.returncode != 0:
            logger.warning("Planner stderr:\n%s", completed.stderr.strip())
            raise ExternalFailure(
                f"planner exited with status {completed.returncode}", completed.stderr
            )

        sas_plan = Path(workdir) / SAS_PLAN
        if plan_file.exists():
            output = plan_file.read_text(encoding="utf-8")
        elif sas_plan.exists():
            output = sas_plan.read_text(encoding="utf-8")
        else:
            output = completed.stdout

    plan = convert_output(output)
    report = validate_plan(domain, problem, plan)
    if report.outcome is not Outcome.VALID:
        raise InvalidExternalPlan(report)
    return plan


class ExternalSolver:
    """PlanSolver that writes the rendered pair to a temporary directory and runs a planner."""

    DEFAULT_TIMEOUT = 300

    def __init__(self, command_template: str, timeout: float = DEFAULT_TIMEOUT):
        _build_command(command_template, {"domain": "", "problem": "", "plan": ""})
        self.command_template = command_template
        self.timeout = timeout

    @property
    def planner_id(self) -> str:
        return "external:" + shlex.split(self.command_template)[0]

    def solve(self, domain: Domain, problem: Problem) -> SolveResult:
        with tempfile.TemporaryDirectory(prefix="plangen-pair-") as tmp:
            domain_file = Path(tmp) / "domain.pddl"
            problem_file = Path(tmp) / "problem.pddl"
            domain_file.write_text(render_domain(domain), encoding="utf-8")
            problem_file.write_text(render_problem(problem), encoding="utf-8")
            try:
                return external_solve(
                    self.command_template,
                    domain_file,
                    problem_file,
                    self.timeout,
                    domain=domain,
                    problem=problem,
                )
            except ExternalFailure as e:
                if e.timed_out:
                    return Unsolved("budget", message=str(e))
                raise
