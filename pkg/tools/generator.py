"""Random problem generation driven by DPGC files, with solvability enforcement."""

import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

from tqdm import tqdm

from planning.model import Atom, Domain, Literal, Problem, TimedPlan, TypedName
from planning.render import render_domain, render_plan, render_problem
from planning.semantics import TOTAL_COST, holds, initial_state
from tools.dpgc import (
    DpgcConfig,
    InvalidDpgc,
    ObjectPool,
    PoolGroup,
    PredicatePool,
    parse_invariant,
    validate_dpgc,
)
from tools.planner import InternalSolver, PlanSolver, SearchConfig, Unsolved
from utils.fileio import atomic_directory
from utils.seeds import derive_seed

logger = logging.getLogger(__name__)


class SamplingFailure(Exception):
    """No acceptable problem was drawn within ``max_retries`` attempts."""


class TagResolutionError(SamplingFailure):
    """A predicate pool consumed a tag with no published values."""


class BatchExhausted(Exception):
    def __init__(self, slot: int, succeeded: int, requested: int):
        self.slot = slot
        self.succeeded = succeeded
        self.requested = requested
        super().__init__(
            f"slot {slot} exceeded its retry budget; {succeeded} of {requested} pairs were produced"
        )

    def __reduce__(self):
        return (BatchExhausted, (self.slot, self.succeeded, self.requested))


class _PoolExhausted(Exception):
    pass


@dataclass
class BatchManifest:
    """Provenance of a written batch; read back by the dataset assembler."""

    domain: str
    dpgc_file: str = ""
    seed: Optional[int] = None
    entries: list = field(default_factory=list)

    def save(self, path: Union[str, Path]) -> None:
        payload = {
            "domain": self.domain,
            "dpgc_file": self.dpgc_file,
            "seed": self.seed,
            "entries": self.entries,
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "BatchManifest":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            domain=payload["domain"],
            dpgc_file=payload.get("dpgc_file", ""),
            seed=payload.get("seed"),
            entries=payload.get("entries", []),
        )


@dataclass(frozen=True)
class GeneratedPair:
    """One batch slot: the problem and its plan (TimedPlan, Unsolved, or None when not solved)."""

    slot: int
    seed: int
    problem: Problem
    plan: Union[TimedPlan, Unsolved, None]
    attempts: int = 1
    planner_id: str = ""
    duplicate_of: Optional[int] = None

    @property
    def solved(self) -> bool:
        return isinstance(self.plan, TimedPlan)


class _Selector:
    """Hands out objects of one pool for a single predicate-pool draw."""

    def __init__(self, pool: ObjectPool, objects: list[str], rng: random.Random, mode: Optional[str] = None):
        self.pool = pool
        self.mode = mode or pool.selection
        self.objects = objects
        self.rng = rng
        self.position = 0
        if self.mode == "exclusive":
            self.remaining = list(objects)
            rng.shuffle(self.remaining)

    def next(self) -> str:
        if self.mode == "exclusive":
            if not self.remaining:
                raise _PoolExhausted(self.pool.name)
            return self.remaining.pop()
        if self.mode == "sequential":
            obj = self.objects[self.position % len(self.objects)]
            self.position += 1
            return obj
        return self.rng.choice(self.objects)


def choose_member(group: PoolGroup, rng: random.Random) -> PredicatePool:
    """Pick one member of an exclusive-choice group according to its weights."""
    return rng.choices(group.members, weights=group.weights, k=1)[0]


class _Draw:
    """State of one generation attempt."""

    def __init__(self, config: DpgcConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.objects: dict[str, list[str]] = {}
        self.tags: dict[str, list[str]] = {}

    def instantiate_pools(self) -> list[TypedName]:
        typed = []
        for pool in self.config.object_pools:
            if isinstance(pool.count, int):
                size = pool.count
            else:
                size = self.rng.randint(*pool.count)
            names = [pool.object_name(i) for i in range(1, size + 1)]
            self.objects[pool.name] = names
            typed.extend(TypedName(n, pool.type) for n in names)
        return typed

    def _count(self, member: PredicatePool) -> int:
        count = member.count
        if isinstance(count, int):
            return count
        if isinstance(count, tuple):
            return self.rng.randint(*count)
        kind, ref = count.split(":", 1)
        if kind == "each":
            return len(self.objects[ref])
        return len(self.tags.get(ref, []))

    def sample(self, member: PredicatePool) -> list[Literal]:
        count = self._count(member)
        # One selector per (pool, mode), created in argument order
        selectors: dict[tuple[str, str], _Selector] = {}
        keys = []
        for source in member.args:
            if source.kind != "pool":
                keys.append(None)
                continue
            pool = self.config.pool(source.ref)
            key = (source.ref, source.selection or pool.selection)
            if key not in selectors:
                selectors[key] = _Selector(pool, self.objects[source.ref], self.rng, key[1])
            keys.append(key)
        literals = []
        for k in range(count):
            args = []
            for source, key in zip(member.args, keys):
                if source.kind == "pool":
                    args.append(selectors[key].next())
                elif source.kind == "object":
                    args.append(source.ref)
                else:
                    values = self.tags.get(source.ref)
                    if not values:
                        raise TagResolutionError(
                            f"{member.name} consumes tag {source.ref} with no published values"
                        )
                    args.append(values[k % len(values)])
            for emit in member.emits:
                self.tags.setdefault(emit.tag, []).append(args[emit.position])
            literals.append(Literal(Atom(member.predicate, tuple(args)), member.negated))
        return literals

    def sample_groups(self, groups: Sequence[PoolGroup]) -> list[Literal]:
        literals = []
        for group in groups:
            if group.mode == "exclusive-choice":
                members = [choose_member(group, self.rng)]
            else:
                members = list(group.members)
            for member in members:
                literals.extend(self.sample(member))
        return literals


def _unique(items):
    seen = set()
    result = []
    for item in items:
        if item not in seen:
            seen.add(item)
            result.append(item)
    return result


def _attempt(domain: Domain, config: DpgcConfig, rng: random.Random) -> Problem:
    draw = _Draw(config, rng)
    objects = draw.instantiate_pools()

    init = [parse_invariant(text)[0] for text in config.init_invariants]
    init.extend(lit.atom for lit in draw.sample_groups(config.init_groups))

    goal = []
    for text in config.goal_invariants:
        atom, negated = parse_invariant(text, negated_allowed=True)
        goal.append(Literal(atom, negated))
    goal.extend(draw.sample_groups(config.goal_groups))

    function_values: tuple = ()
    metric = None
    cost_function = domain.get_function(TOTAL_COST)
    if cost_function is not None and not cost_function.parameters:
        function_values = ((Atom(TOTAL_COST), 0),)
        metric = ("minimize", Atom(TOTAL_COST))

    return Problem(
        name=f"{domain.name}-problem",
        domain_name=domain.name,
        objects=tuple(objects),
        init=tuple(_unique(init)),
        goal=tuple(_unique(goal)),
        function_values=function_values,
        metric=metric,
    )


def generate_problem(domain: Domain, config: DpgcConfig, seed: int) -> Problem:
    """
    Draw one problem; deterministic in (config, seed).

    Draws that exhaust an exclusive pool, have an empty goal although goal
    sources exist, or (with ``reject_trivial``) a goal that already holds are
    redrawn with a derived seed.

    Raises:
        InvalidDpgc: When ``validate_dpgc`` reports diagnostics
        SamplingFailure: After ``config.max_retries`` rejected draws
        TagResolutionError: When a consumed tag has no values
    """
    diagnostics = validate_dpgc(config, domain)
    if diagnostics:
        raise InvalidDpgc(diagnostics)
    return _generate_checked(domain, config, seed)


def _generate_checked(domain: Domain, config: DpgcConfig, seed: int) -> Problem:
    has_goal_sources = bool(config.goal_invariants or config.goal_groups)
    for attempt in range(config.max_retries):
        rng = random.Random(derive_seed(seed, attempt))
        try:
            problem = _attempt(domain, config, rng)
        except _PoolExhausted as e:
            logger.debug("Draw %d rejected: exclusive pool %s exhausted", attempt, e)
            continue
        if has_goal_sources and not problem.goal:
            logger.debug("Draw %d rejected: empty goal", attempt)
            continue
        if config.reject_trivial and problem.goal and holds(initial_state(problem), problem.goal):
            logger.debug("Draw %d rejected: goal holds initially", attempt)
            continue
        return problem
    raise SamplingFailure(f"no acceptable problem after {config.max_retries} draws (seed {seed})")


def _default_solver(config: DpgcConfig, planner_cfg: Optional[SearchConfig]) -> InternalSolver:
    planner_cfg = planner_cfg or SearchConfig()
    if config.solvability.mode == "planner-check":
        planner_cfg = replace(planner_cfg, max_expansions=config.solvability.max_expansions)
    return InternalSolver(planner_cfg)


def _run_slot(task) -> GeneratedPair:
    domain, config, seed, slot, solver, solve_problems = task
    planner_check = config.solvability.mode == "planner-check" and solve_problems
    for attempt in range(config.max_retries):
        slot_seed = derive_seed(seed, slot, attempt)
        try:
            problem = _generate_checked(domain, config, slot_seed)
        except TagResolutionError:
            raise
        except SamplingFailure:
            continue
        if not solve_problems:
            return GeneratedPair(slot, slot_seed, problem, None, attempt + 1)
        result = solver.solve(domain, problem)
        if isinstance(result, Unsolved) and planner_check:
            logger.debug("Slot %d draw %d rejected: %s", slot, attempt, result)
            continue
        return GeneratedPair(slot, slot_seed, problem, result, attempt + 1, solver.planner_id)
    raise BatchExhausted(slot, 0, 0)


def generate_batch(
    domain: Domain,
    config: DpgcConfig,
    count: int,
    seed: int,
    planner_cfg: Optional[SearchConfig] = None,
    solver: Optional[PlanSolver] = None,
    solve_problems: bool = True,
    jobs: int = 1,
    progress: bool = False,
) -> list[GeneratedPair]:
    """
    Generate ``count`` (problem, plan) pairs.

    Slot ``k`` uses sub-seeds ``derive_seed(seed, k, attempt)``, so the batch
    does not depend on ``jobs``.

    Args:
        domain: Parsed domain
        config: DPGC for the domain
        count: Number of pairs (at least 1)
        seed: Batch seed
        planner_cfg: Search configuration for the internal planner
        solver: Any PlanSolver; overrides ``planner_cfg``
        solve_problems: False skips planning entirely (pairs carry ``plan=None``)
        jobs: Worker processes
        progress: Show a tqdm progress bar

    Raises:
        InvalidDpgc, BatchExhausted, TagResolutionError
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    diagnostics = validate_dpgc(config, domain)
    if diagnostics:
        raise InvalidDpgc(diagnostics)
    solver = solver or _default_solver(config, planner_cfg)
    tasks = [(domain, config, seed, slot, solver, solve_problems) for slot in range(count)]

    pairs: list[GeneratedPair] = []
    bar = tqdm(total=count, desc=f"Generating {domain.name}", unit="problem", disable=not progress)
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                for pair in executor.map(_run_slot, tasks):
                    pairs.append(pair)
                    bar.update()
        else:
            for task in tasks:
                pairs.append(_run_slot(task))
                bar.update()
    except BatchExhausted as e:
        raise BatchExhausted(e.slot, len(pairs), count) from None
    finally:
        bar.close()

    return _flag_duplicates(pairs)


def _flag_duplicates(pairs: list[GeneratedPair]) -> list[GeneratedPair]:
    first_seen: dict[str, int] = {}
    flagged = []
    for pair in pairs:
        text = render_problem(pair.problem)
        if text in first_seen:
            logger.warning("Slot %d duplicates slot %d", pair.slot, first_seen[text])
            pair = replace(pair, duplicate_of=first_seen[text])
        else:
            first_seen[text] = pair.slot
        flagged.append(pair)
    return flagged


def write_batch(
    domain: Domain,
    pairs: Sequence[GeneratedPair],
    out_dir: Union[str, Path],
    dpgc_file: str = "",
    seed: Optional[int] = None,
) -> Path:
    """
    Write ``domain.pddl``, ``problem_<k>.pddl``, ``plan_<k>.txt`` (solved slots) and ``batch.json``.

    ``k`` is the 1-based slot number. The directory appears atomically.
    """
    out_dir = Path(out_dir)
    entries = []
    with atomic_directory(out_dir) as staging:
        (staging / "domain.pddl").write_text(render_domain(domain), encoding="utf-8")
        for pair in pairs:
            k = pair.slot + 1
            (staging / f"problem_{k}.pddl").write_text(render_problem(pair.problem), encoding="utf-8")
            entry = {
                "slot": k,
                "seed": pair.seed,
                "problem": f"problem_{k}.pddl",
                "plan": None,
                "status": "unsolved" if isinstance(pair.plan, Unsolved) else "skipped",
                "planner": pair.planner_id,
                "duplicate_of": None if pair.duplicate_of is None else pair.duplicate_of + 1,
            }
            if isinstance(pair.plan, TimedPlan):
                (staging / f"plan_{k}.txt").write_text(render_plan(pair.plan) + "\n", encoding="utf-8")
                entry["plan"] = f"plan_{k}.txt"
                entry["status"] = "solved"
            entries.append(entry)
        BatchManifest(
            domain=domain.name,
            dpgc_file=dpgc_file,
            seed=seed,
            entries=entries,
        ).save(staging / "batch.json")
    logger.info("Wrote %d problems to %s", len(pairs), out_dir)
    return out_dir
