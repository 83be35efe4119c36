"""Grounding and closed-world state transitions for typed STRIPS."""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from planning.errors import (
    ArityMismatch,
    PreconditionViolation,
    TypeMismatch,
    UndefinedFunctionValue,
    UnknownAction,
    UnknownObject,
)
from planning.model import ActionSchema, Atom, Domain, Literal, Problem

logger = logging.getLogger(__name__)

TOTAL_COST = "total-cost"


@dataclass(frozen=True)
class GroundAction:
    """
    A fully instantiated action.

    Equality literals stay in ``precondition`` and are evaluated on object
    names; they never enter a state.
    """

    name: str
    args: tuple[str, ...]
    precondition: tuple[Literal, ...]
    add_effects: frozenset[Atom]
    delete_effects: frozenset[Atom]
    cost_delta: int = 0

    def __str__(self) -> str:
        if not self.args:
            return f"({self.name})"
        return f"({self.name} {' '.join(self.args)})"


@dataclass(frozen=True)
class State:
    atoms: frozenset[Atom]
    cost: int = 0

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class SatisfactionReport:
    satisfied: bool
    violated: tuple[Literal, ...] = ()

    def __bool__(self) -> bool:
        return self.satisfied


def literal_holds(atoms: frozenset[Atom], literal: Literal) -> bool:
    if literal.atom.is_equality:
        left, right = literal.atom.args
        truth = left == right
    else:
        truth = literal.atom in atoms
    return truth != literal.negated


def _object_types(domain: Domain, problem: Problem) -> dict[str, str]:
    types = {c.name: c.type for c in domain.constants}
    types.update({o.name: o.type for o in problem.objects})
    return types


def _function_values(problem: Problem) -> dict[Atom, int]:
    return dict(problem.function_values)


def _instantiate(
    schema: ActionSchema,
    args: tuple[str, ...],
    function_values: dict[Atom, int],
) -> GroundAction:
    binding = {p.name: a for p, a in zip(schema.parameters, args)}

    precondition: list[Literal] = []
    for lit in schema.precondition:
        ground_lit = lit.substitute(binding)
        if ground_lit not in precondition:
            precondition.append(ground_lit)

    adds = frozenset(a.substitute(binding) for a in schema.add_effects)
    # Delete-then-add: an atom both deleted and added ends up true
    deletes = frozenset(a.substitute(binding) for a in schema.delete_effects) - adds

    cost_delta = 0
    if schema.cost is not None:
        amount = schema.cost.amount
        if isinstance(amount, int):
            cost_delta = amount
        else:
            term = amount.substitute(binding)
            if term not in function_values:
                raise UndefinedFunctionValue(f"no initial value for cost term {term}")
            cost_delta = function_values[term]

    return GroundAction(
        name=schema.name,
        args=args,
        precondition=tuple(precondition),
        add_effects=adds,
        delete_effects=deletes,
        cost_delta=cost_delta,
    )


def ground(domain: Domain, problem: Problem, name: str, args: Sequence[str]) -> GroundAction:
    """
    Substitute ``args`` into the schema called ``name``.

    Raises:
        UnknownAction: No schema with that name
        ArityMismatch: Wrong number of arguments
        UnknownObject: An argument is neither an object nor a constant
        TypeMismatch: An argument's type is not a subtype of the parameter type
        UndefinedFunctionValue: A static cost term has no initial value
    """
    schema = domain.get_action(name)
    if schema is None:
        raise UnknownAction(f"unknown action {name}")
    args = tuple(a.lower() for a in args)
    if len(args) != schema.arity:
        raise ArityMismatch(
            f"action {schema.name} takes {schema.arity} arguments, got {len(args)}"
        )
    object_types = _object_types(domain, problem)
    for position, (param, arg) in enumerate(zip(schema.parameters, args), start=1):
        if arg not in object_types:
            raise UnknownObject(f"unknown object {arg} in ({schema.name} {' '.join(args)})")
        actual = object_types[arg]
        if not domain.is_subtype(actual, param.type):
            raise TypeMismatch(
                f"parameter {position} of {schema.name} expects {param.type}, "
                f"got {arg} of type {actual}",
                parameter=position,
                expected=param.type,
                received=actual,
            )
    return _instantiate(schema, args, _function_values(problem))


def initial_state(problem: Problem) -> State:
    """Closed-world initial state; cost starts at the ``total-cost`` initialisation or 0."""
    cost = 0
    for term, value in problem.function_values:
        if term == Atom(TOTAL_COST):
            cost = value
    return State(frozenset(problem.init), cost)


def applicable(state: State, action: GroundAction) -> SatisfactionReport:
    violated = tuple(lit for lit in action.precondition if not literal_holds(state.atoms, lit))
    return SatisfactionReport(not violated, violated)


def apply(state: State, action: GroundAction) -> State:
    """
    Successor state: ``(atoms - deletes) | adds``, cost increased by the action's delta.

    Raises:
        PreconditionViolation: When the action is not applicable in ``state``
    """
    report = applicable(state, action)
    if not report.satisfied:
        raise PreconditionViolation(
            f"{action} is not applicable: " + ", ".join(str(v) for v in report.violated),
            report.violated,
        )
    atoms = (state.atoms - action.delete_effects) | action.add_effects
    return State(atoms, state.cost + action.cost_delta)


def unsatisfied(state: State, goal: Sequence[Literal]) -> tuple[Literal, ...]:
    return tuple(lit for lit in goal if not literal_holds(state.atoms, lit))


def holds(state: State, goal: Sequence[Literal]) -> bool:
    return all(literal_holds(state.atoms, lit) for lit in goal)


class Grounder:
    """Enumerates the type-consistent ground actions of a (domain, problem) pair."""

    def __init__(self, domain: Domain, problem: Problem):
        self.domain = domain
        self.problem = problem
        self.object_types = _object_types(domain, problem)
        self.function_values = _function_values(problem)
        self._objects_of_type: dict[str, list[str]] = {}

    def objects_of_type(self, type_name: str) -> list[str]:
        """Objects (constants first, then problem objects) whose type is a subtype of ``type_name``."""
        if type_name not in self._objects_of_type:
            self._objects_of_type[type_name] = [
                name
                for name, actual in self.object_types.items()
                if self.domain.is_subtype(actual, type_name)
            ]
        return self._objects_of_type[type_name]

    def count(self) -> int:
        """Number of ground actions ``all_actions`` would yield before pruning."""
        total = 0
        for schema in self.domain.actions:
            size = 1
            for param in schema.parameters:
                size *= len(self.objects_of_type(param.type))
            total += size
        return total

    def all_actions(self, schema: Optional[ActionSchema] = None) -> Iterator[GroundAction]:
        schemas = [schema] if schema is not None else list(self.domain.actions)
        for sch in schemas:
            candidates = [self.objects_of_type(p.type) for p in sch.parameters]
            for args in itertools.product(*candidates):
                yield _instantiate(sch, tuple(args), self.function_values)
