"""Seeded random plans, random tasks and naive reference executors for property tests."""

import itertools
import random
from collections import deque
from typing import Optional

from planning.model import Domain, Literal, PlanStep, Problem, TimedPlan
from planning.parser import parse_domain, parse_problem
from planning.semantics import Grounder

TYPE_LAYOUTS = (
    (("t0", "object"),),
    (("t0", "object"), ("t1", "object")),
    (("t0", "object"), ("t1", "t0")),
)

REQUIREMENTS = "(:requirements :strips :typing :negative-preconditions :equality)"


def random_plan(domain: Domain, problem: Problem, length: int, seed: int) -> TimedPlan:
    """Uniformly random type-correct steps; most are not executable."""
    rng = random.Random(seed)
    actions = list(Grounder(domain, problem).all_actions())
    if not actions:
        return TimedPlan.from_actions([])
    chosen = [rng.choice(actions) for _ in range(length)]
    return TimedPlan.from_actions([(a.name, a.args) for a in chosen])


def random_walk(domain: Domain, problem: Problem, length: int, seed: int) -> TimedPlan:
    """Executable steps picked at random from the applicable set."""
    rng = random.Random(seed)
    actions = list(Grounder(domain, problem).all_actions())
    atoms = set(problem.init)
    steps = []
    for _ in range(length):
        options = [a for a in actions if all(_holds(atoms, lit) for lit in a.precondition)]
        if not options:
            break
        action = rng.choice(options)
        atoms = (atoms - action.delete_effects) | action.add_effects
        steps.append((action.name, action.args))
    return TimedPlan.from_actions(steps)


# ---------------------------------------------------------------------------
# random tasks
# ---------------------------------------------------------------------------

def _supertypes(parents: dict[str, str], type_name: str) -> set[str]:
    chain = {type_name}
    while type_name != "object":
        type_name = parents.get(type_name, "object")
        chain.add(type_name)
    return chain


def _atom_text(predicate: str, args) -> str:
    return "(" + " ".join((predicate, *args)) + ")"


def _random_schema(rng: random.Random, name: str, types, parents, predicates) -> str:
    params = [(f"?v{i}", rng.choice(types)) for i in range(rng.randint(0, 2))]

    def lifted_atom() -> Optional[str]:
        predicate, signature = rng.choice(sorted(predicates.items()))
        args = []
        for wanted in signature:
            fits = [v for v, t in params if wanted in _supertypes(parents, t)]
            if not fits:
                return None
            args.append(rng.choice(fits))
        return _atom_text(predicate, args)

    precondition = []
    for _ in range(rng.randint(0, 3)):
        atom = lifted_atom()
        if atom is not None:
            precondition.append(f"(not {atom})" if rng.random() < 0.3 else atom)
    if len(params) == 2 and rng.random() < 0.3:
        equality = f"(= {params[0][0]} {params[1][0]})"
        precondition.append(equality if rng.random() < 0.3 else f"(not {equality})")

    adds: list[str] = []
    deletes: list[str] = []
    for _ in range(rng.randint(1, 3)):
        atom = lifted_atom()
        if atom is None:
            continue
        if rng.random() < 0.5:
            if atom not in adds and atom not in deletes:
                deletes.append(atom)
        elif atom not in deletes and atom not in adds:
            adds.append(atom)
    effects = adds + [f"(not {atom})" for atom in deletes]

    parameters = " ".join(f"{v} - {t}" for v, t in params)
    return (
        f"  (:action {name}\n"
        f"    :parameters ({parameters})\n"
        f"    :precondition (and {' '.join(precondition)})\n"
        f"    :effect (and {' '.join(effects)}))"
    )


def _problem_text(objects, init, goal) -> str:
    declared = " ".join(f"{name} - {type_name}" for name, type_name in objects)
    return (
        "(define (problem random-task) (:domain random-domain)\n"
        f"  (:objects {declared})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})))"
    )


def random_task(seed: int) -> tuple[Domain, Problem]:
    """
    A parsed random typed-STRIPS task: 1-3 schemas, 1-6 objects.

    The goal is drawn from the state a short random walk reaches, so most
    tasks are solvable and some are solved by the empty plan.
    """
    rng = random.Random(seed)
    layout = rng.choice(TYPE_LAYOUTS)
    parents = dict(layout)
    types = list(parents)
    predicates = {
        "p0": (),
        "p1": (rng.choice(types),),
        "p2": (rng.choice(types), rng.choice(types)),
        "p3": (rng.choice(types),),
    }
    declared_types = " ".join(f"{name} - {parent}" for name, parent in layout)
    declared_predicates = " ".join(
        _atom_text(name, [f"?x{i} - {t}" for i, t in enumerate(signature)])
        for name, signature in predicates.items()
    )
    schemas = [
        _random_schema(rng, f"a{i}", types, parents, predicates) for i in range(rng.randint(1, 3))
    ]
    domain = parse_domain(
        "(define (domain random-domain)\n"
        f"  {REQUIREMENTS}\n"
        f"  (:types {declared_types})\n"
        f"  (:predicates {declared_predicates})\n" + "\n".join(schemas) + ")"
    )

    objects = [(f"o{i}", rng.choice(types)) for i in range(rng.randint(1, 6))]
    ground_atoms = []
    for name, signature in predicates.items():
        candidates = [
            [o for o, t in objects if wanted in _supertypes(parents, t)] for wanted in signature
        ]
        ground_atoms.extend(_atom_text(name, args) for args in itertools.product(*candidates))
    init = [atom for atom in ground_atoms if rng.random() < 0.4]

    open_problem = parse_problem(_problem_text(objects, init, []), domain)
    walk = random_walk(domain, open_problem, rng.randint(0, 4), rng.randrange(2**31))
    reached = sorted(_atom_text(a.predicate, a.args) for a in final_atoms(domain, open_problem, walk))
    absent = sorted(set(ground_atoms) - set(reached))
    goal = rng.sample(reached, min(len(reached), rng.randint(1, 2)))
    if absent and rng.random() < 0.3:
        goal.append(f"(not {rng.choice(absent)})")
    if not goal:
        goal = ["(p0)"]
    return domain, parse_problem(_problem_text(objects, init, goal), domain)


# ---------------------------------------------------------------------------
# plan mutations
# ---------------------------------------------------------------------------

def _rebuild(steps: list[PlanStep]) -> TimedPlan:
    return TimedPlan.from_actions([(s.action, s.args) for s in steps])


def drop_step(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    steps = list(plan.steps)
    if steps:
        del steps[rng.randrange(len(steps))]
    return _rebuild(steps)


def swap_steps(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    steps = list(plan.steps)
    if len(steps) >= 2:
        i, j = rng.sample(range(len(steps)), 2)
        steps[i], steps[j] = steps[j], steps[i]
    return _rebuild(steps)


def duplicate_step(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    steps = list(plan.steps)
    if steps:
        index = rng.randrange(len(steps))
        steps.insert(index, steps[index])
    return _rebuild(steps)


def _edit_step(plan: TimedPlan, rng: random.Random, edit) -> TimedPlan:
    steps = list(plan.steps)
    if steps:
        index = rng.randrange(len(steps))
        steps[index] = edit(steps[index])
    return _rebuild(steps)


def swap_args(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    return _edit_step(plan, rng, lambda s: PlanStep(s.timestamp, s.action, tuple(reversed(s.args))))


def drop_arg(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    return _edit_step(plan, rng, lambda s: PlanStep(s.timestamp, s.action, s.args[:-1]))


def extra_arg(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    return _edit_step(plan, rng, lambda s: PlanStep(s.timestamp, s.action, (*s.args, "o0")))


def unknown_object(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    def edit(step: PlanStep) -> PlanStep:
        if not step.args:
            return step
        args = list(step.args)
        args[rng.randrange(len(args))] = "ghost"
        return PlanStep(step.timestamp, step.action, tuple(args))

    return _edit_step(plan, rng, edit)


def unknown_action(plan: TimedPlan, rng: random.Random) -> TimedPlan:
    return _edit_step(plan, rng, lambda s: PlanStep(s.timestamp, "zz-unknown", s.args))


MUTATIONS = (
    drop_step,
    swap_steps,
    duplicate_step,
    swap_args,
    drop_arg,
    extra_arg,
    unknown_object,
    unknown_action,
)


def random_case(seed: int) -> tuple[Domain, Problem, TimedPlan]:
    """A random task with a random or walked plan and up to two mutations applied."""
    rng = random.Random(seed)
    domain, problem = random_task(rng.randrange(2**31))
    length = rng.randint(0, 5)
    if rng.random() < 0.5:
        plan = random_walk(domain, problem, length, rng.randrange(2**31))
    else:
        plan = random_plan(domain, problem, length, rng.randrange(2**31))
    for _ in range(rng.choice((0, 0, 1, 2))):
        plan = rng.choice(MUTATIONS)(plan, rng)
    return domain, problem, plan


# ---------------------------------------------------------------------------
# reference executors
# ---------------------------------------------------------------------------

def _holds(atoms: set, literal: Literal) -> bool:
    if literal.atom.is_equality:
        truth = literal.atom.args[0] == literal.atom.args[1]
    else:
        truth = literal.atom in atoms
    return truth != literal.negated


def _step(atoms: set, schema, args) -> tuple[bool, set]:
    binding = {p.name: a for p, a in zip(schema.parameters, args)}
    precondition = [lit.substitute(binding) for lit in schema.precondition]
    if not all(_holds(atoms, lit) for lit in precondition):
        return False, atoms
    adds = {a.substitute(binding) for a in schema.add_effects}
    deletes = {a.substitute(binding) for a in schema.delete_effects}
    return True, (atoms - deletes) | adds


def final_atoms(domain: Domain, problem: Problem, plan: TimedPlan) -> set:
    """Atoms after executing an executable ``plan``."""
    by_name = {a.name: a for a in domain.actions}
    atoms = set(problem.init)
    for step in plan.steps:
        _, atoms = _step(atoms, by_name[step.action], step.args)
    return atoms


def naive_outcome(domain: Domain, problem: Problem, plan: TimedPlan) -> str:
    """Reference classification over plain sets, independent of the validator."""
    by_name = {a.name: a for a in domain.actions}
    declared = {c.name: c.type for c in domain.constants}
    declared.update({o.name: o.type for o in problem.objects})
    parents = dict(domain.types)
    for step in plan.steps:
        schema = by_name.get(step.action)
        if schema is None or len(step.args) != len(schema.parameters):
            return "Malformed"
        for param, arg in zip(schema.parameters, step.args):
            if arg not in declared or param.type not in _supertypes(parents, declared[arg]):
                return "Malformed"

    atoms = set(problem.init)
    for step in plan.steps:
        executable, atoms = _step(atoms, by_name[step.action], step.args)
        if not executable:
            return "PreconditionFailure"

    if all(_holds(atoms, lit) for lit in problem.goal):
        return "Valid"
    return "ExecutableNoGoal"


class StateSpaceTooLarge(Exception):
    """More reachable states than the exhaustive search may visit."""


def shortest_plan_length(domain: Domain, problem: Problem, max_states: int = 10_000) -> Optional[int]:
    """
    Length of a shortest plan by exhaustive breadth-first search, or None if unsolvable.

    Grounds by brute force over declared object types rather than through
    the planner's grounding.

    Raises:
        StateSpaceTooLarge: More than ``max_states`` reachable states
    """
    declared = {c.name: c.type for c in domain.constants}
    declared.update({o.name: o.type for o in problem.objects})
    parents = dict(domain.types)
    ground = []
    for schema in domain.actions:
        candidates = [
            [name for name, t in declared.items() if p.type in _supertypes(parents, t)]
            for p in schema.parameters
        ]
        ground.extend((schema, args) for args in itertools.product(*candidates))

    start = frozenset(problem.init)
    depth = {start: 0}
    queue = deque([start])
    while queue:
        atoms = queue.popleft()
        if all(_holds(atoms, lit) for lit in problem.goal):
            return depth[atoms]
        for schema, args in ground:
            executable, successor = _step(set(atoms), schema, args)
            if not executable:
                continue
            successor = frozenset(successor)
            if successor not in depth:
                if len(depth) >= max_states:
                    raise StateSpaceTooLarge(f"more than {max_states} reachable states")
                depth[successor] = depth[atoms] + 1
                queue.append(successor)
    return None
