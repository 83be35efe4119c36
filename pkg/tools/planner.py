"""Internal satisficing forward-search planner."""

import heapq
import logging
import random
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Union, runtime_checkable

from planning.model import Atom, Domain, Problem, TimedPlan
from planning.semantics import GroundAction, Grounder, initial_state, literal_holds
from tools.validator import Outcome, validate_plan

logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    GREEDY_BEST_FIRST = "greedy-best-first"
    BREADTH_FIRST = "breadth-first"


class Heuristic(str, Enum):
    GOAL_COUNT = "goal-count"
    ZERO = "zero"


class GroundingExplosion(Exception):
    """The ground action count exceeds the configured cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} ground actions exceed the cap of {cap}")

    def __reduce__(self):
        return (GroundingExplosion, (self.count, self.cap))


class PlannerSoundnessError(AssertionError):
    """A plan produced by the search failed validation."""


@dataclass(frozen=True)
class SearchConfig:
    DEFAULT_MAX_EXPANSIONS = 100_000
    DEFAULT_MAX_PLAN_LENGTH = 256
    DEFAULT_GROUNDING_CAP = 250_000

    strategy: Strategy = Strategy.GREEDY_BEST_FIRST
    heuristic: Heuristic = Heuristic.GOAL_COUNT
    max_expansions: int = DEFAULT_MAX_EXPANSIONS
    max_plan_length: int = DEFAULT_MAX_PLAN_LENGTH
    seed: int = 0
    grounding_cap: int = DEFAULT_GROUNDING_CAP

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
        if self.strategy is Strategy.BREADTH_FIRST and self.heuristic is not Heuristic.ZERO:
            raise ValueError("breadth-first search requires the zero heuristic")
        if self.max_expansions < 1 or self.max_plan_length < 1 or self.grounding_cap < 1:
            raise ValueError("search limits must be positive")

    @classmethod
    def breadth_first(cls, **kwargs) -> "SearchConfig":
        return cls(strategy=Strategy.BREADTH_FIRST, heuristic=Heuristic.ZERO, **kwargs)

    @property
    def planner_id(self) -> str:
        return f"internal-{self.strategy.value}-{self.heuristic.value}"


@dataclass(frozen=True)
class Unsolved:
    """No plan: ``exhausted`` (search space explored) or ``budget`` (limit hit)."""

    reason: str
    expansions: int = 0
    message: str = ""

    def __str__(self) -> str:
        return f"Unsolved({self.reason})"


SolveResult = Union[TimedPlan, Unsolved]


@runtime_checkable
class PlanSolver(Protocol):
    """Anything that turns a (domain, problem) pair into a plan or an Unsolved marker."""

    @property
    def planner_id(self) -> str: ...

    def solve(self, domain: Domain, problem: Problem) -> SolveResult: ...


@dataclass(frozen=True)
class _CompiledAction:
    action: GroundAction
    positive: frozenset[Atom]
    negative: frozenset[Atom]


def _static_predicates(domain: Domain) -> set[str]:
    changing = set()
    for schema in domain.actions:
        changing.update(e.atom.predicate for e in schema.effects)
    return {p.name for p in domain.predicates} - changing


def compile_actions(domain: Domain, problem: Problem, cap: int) -> list[_CompiledAction]:
    """
    Ground every schema and drop actions that can never fire.

    Equality literals and literals over static predicates are decided against
    the initial state and removed from the compiled precondition.

    Raises:
        GroundingExplosion: When the raw ground action count exceeds ``cap``
    """
    grounder = Grounder(domain, problem)
    count = grounder.count()
    if count > cap:
        raise GroundingExplosion(count, cap)

    static = _static_predicates(domain)
    init = frozenset(problem.init)
    compiled = []
    for action in grounder.all_actions():
        positive, negative = set(), set()
        feasible = True
        for lit in action.precondition:
            if lit.atom.is_equality or lit.atom.predicate in static:
                if not literal_holds(init, lit):
                    feasible = False
                    break
                continue
            (negative if lit.negated else positive).add(lit.atom)
        if feasible:
            compiled.append(_CompiledAction(action, frozenset(positive), frozenset(negative)))
    logger.debug("Grounded %d actions, %d after static pruning", count, len(compiled))
    return compiled


def _goal_count(atoms: frozenset[Atom], goal) -> int:
    return sum(1 for lit in goal if not literal_holds(atoms, lit))


def _extract(parents: dict, atoms: frozenset[Atom]) -> list[GroundAction]:
    steps = []
    while parents[atoms] is not None:
        previous, action = parents[atoms]
        steps.append(action)
        atoms = previous
    steps.reverse()
    return steps


def solve(domain: Domain, problem: Problem, config: Optional[SearchConfig] = None) -> SolveResult:
    """
    Forward search from the initial state.

    Args:
        domain: Parsed domain
        problem: Parsed problem
        config: Strategy, heuristic, limits and tie-breaking seed

    Returns:
        A TimedPlan with step-index timestamps, or Unsolved

    Raises:
        GroundingExplosion: Too many ground actions
        PlannerSoundnessError: The found plan does not validate
    """
    config = config or SearchConfig()
    actions = compile_actions(domain, problem, config.grounding_cap)
    rng = random.Random(config.seed)
    goal = problem.goal
    use_heuristic = config.heuristic is Heuristic.GOAL_COUNT

    start = initial_state(problem).atoms
    parents: dict[frozenset[Atom], Optional[tuple]] = {start: None}
    depth = {start: 0}

    if _goal_count(start, goal) == 0:
        return _finish(domain, problem, [])

    counter = 0
    if config.strategy is Strategy.BREADTH_FIRST:
        frontier: Union[deque, list] = deque([start])
    else:
        frontier = [(_goal_count(start, goal) if use_heuristic else 0, counter, start)]

    expansions = 0
    while frontier:
        if expansions >= config.max_expansions:
            logger.debug("Search budget of %d expansions exhausted", config.max_expansions)
            return Unsolved("budget", expansions, f"{expansions} expansions")
        if config.strategy is Strategy.BREADTH_FIRST:
            atoms = frontier.popleft()
        else:
            atoms = heapq.heappop(frontier)[2]
        expansions += 1
        if depth[atoms] >= config.max_plan_length:
            continue

        successors = [
            c for c in actions if c.positive <= atoms and not (c.negative & atoms)
        ]
        rng.shuffle(successors)
        for compiled in successors:
            action = compiled.action
            child = (atoms - action.delete_effects) | action.add_effects
            if child in parents:
                continue
            parents[child] = (atoms, action)
            depth[child] = depth[atoms] + 1
            h = _goal_count(child, goal)
            if h == 0:
                return _finish(domain, problem, _extract(parents, child))
            if config.strategy is Strategy.BREADTH_FIRST:
                frontier.append(child)
            else:
                counter += 1
                heapq.heappush(frontier, (h if use_heuristic else 0, counter, child))

    return Unsolved("exhausted", expansions, f"{len(parents)} states explored")


def _finish(domain: Domain, problem: Problem, steps: list[GroundAction]) -> TimedPlan:
    plan = TimedPlan.from_actions([(a.name, a.args) for a in steps])
    report = validate_plan(domain, problem, plan)
    if report.outcome is not Outcome.VALID:
        raise PlannerSoundnessError(f"internal plan for {problem.name} is {report.outcome}")
    return plan


class InternalSolver:
    """PlanSolver backed by ``solve``."""

    def __init__(self, config: Optional[SearchConfig] = None):
        self.config = config or SearchConfig()

    @property
    def planner_id(self) -> str:
        return self.config.planner_id

    def solve(self, domain: Domain, problem: Problem) -> SolveResult:
        return solve(domain, problem, self.config)


__all__ = [
    "Strategy",
    "Heuristic",
    "SearchConfig",
    "Unsolved",
    "SolveResult",
    "PlanSolver",
    "InternalSolver",
    "GroundingExplosion",
    "PlannerSoundnessError",
    "compile_actions",
    "solve",
]
