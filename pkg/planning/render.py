"""Canonical, deterministic PDDL printing.

Declarations print in source order so that ``parse(render(x)) == x`` and so
that anonymised renders differ from the original only in symbol names.
"""

from functools import singledispatch
from typing import Sequence

from planning.model import (
    OBJECT,
    ActionSchema,
    Atom,
    Domain,
    Literal,
    Problem,
    TimedPlan,
    TypedName,
)

INDENT = "  "


def render_typed_list(entries: Sequence[TypedName]) -> str:
    """
    Render ``a b - t c - u``; ``- object`` is omitted only when every entry is an object.
    """
    if not entries:
        return ""
    if all(e.type == OBJECT for e in entries):
        return " ".join(e.name for e in entries)

    groups: list[tuple[str, list[str]]] = []
    for entry in entries:
        if groups and groups[-1][0] == entry.type:
            groups[-1][1].append(entry.name)
        else:
            groups.append((entry.type, [entry.name]))
    return " ".join(f"{' '.join(names)} - {type_name}" for type_name, names in groups)


def _conjunction(literals: Sequence[Literal]) -> str:
    return "(and" + "".join(f" {lit}" for lit in literals) + ")"


def _render_action(action: ActionSchema) -> list[str]:
    lines = [f"{INDENT}(:action {action.name}"]
    lines.append(f"{INDENT * 2}:parameters ({render_typed_list(action.parameters)})")
    if action.precondition:
        lines.append(f"{INDENT * 2}:precondition {_conjunction(action.precondition)}")
    parts = [str(e) for e in action.effects]
    if action.cost is not None:
        parts.append(f"(increase {action.cost.function} {action.cost.amount})")
    lines.append(f"{INDENT * 2}:effect (and" + "".join(f" {p}" for p in parts) + "))")
    return lines


def render_domain(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append(f"{INDENT}(:requirements {' '.join(domain.requirements)})")
    if domain.types:
        typed = [TypedName(name, parent) for name, parent in domain.types]
        # Parents are always explicit so that the (name, parent) pairs survive reparsing
        groups: list[tuple[str, list[str]]] = []
        for entry in typed:
            if groups and groups[-1][0] == entry.type:
                groups[-1][1].append(entry.name)
            else:
                groups.append((entry.type, [entry.name]))
        text = " ".join(f"{' '.join(names)} - {parent}" for parent, names in groups)
        lines.append(f"{INDENT}(:types {text})")
    if domain.constants:
        lines.append(f"{INDENT}(:constants {render_typed_list(domain.constants)})")
    if domain.predicates:
        signatures = []
        for p in domain.predicates:
            params = render_typed_list(p.parameters)
            signatures.append(f"({p.name} {params})" if params else f"({p.name})")
        lines.append(f"{INDENT}(:predicates {' '.join(signatures)})")
    if domain.functions:
        signatures = []
        for f in domain.functions:
            params = render_typed_list(f.parameters)
            signatures.append(f"({f.name} {params})" if params else f"({f.name})")
        lines.append(f"{INDENT}(:functions {' '.join(signatures)} - number)")
    for action in domain.actions:
        lines.extend(_render_action(action))
    lines.append(")")
    return "\n".join(lines) + "\n"


def render_problem(problem: Problem) -> str:
    lines = [f"(define (problem {problem.name})"]
    lines.append(f"{INDENT}(:domain {problem.domain_name})")
    if problem.objects:
        lines.append(f"{INDENT}(:objects {render_typed_list(problem.objects)})")
    init = [str(atom) for atom in problem.init]
    init.extend(f"(= {term} {value})" for term, value in problem.function_values)
    lines.append(f"{INDENT}(:init" + "".join(f" {a}" for a in init) + ")")
    lines.append(f"{INDENT}(:goal {_conjunction(problem.goal)})")
    if problem.metric is not None:
        direction, term = problem.metric
        lines.append(f"{INDENT}(:metric {direction} {term})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def render_plan(plan: TimedPlan) -> str:
    """Five-digit zero-padded timestamps, one step per line, ``END`` when terminated."""
    lines = [f"{step.timestamp:05d}: {step}" for step in plan.steps]
    if plan.terminated:
        lines.append("END")
    return "\n".join(lines)


@singledispatch
def render(entity) -> str:
    """Render a Domain, Problem or TimedPlan to canonical text."""
    raise TypeError(f"cannot render {type(entity).__name__}")


render.register(Domain, render_domain)
render.register(Problem, render_problem)
render.register(TimedPlan, render_plan)


def render_atom(atom: Atom) -> str:
    return str(atom)
