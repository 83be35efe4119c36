"""Immutable syntax tree for the typed-STRIPS subset of PDDL 2.1."""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

OBJECT = "object"
EQUALITY = "="


@dataclass(frozen=True)
class TypedName:
    """A variable, object or constant together with its declared type."""

    name: str
    type: str = OBJECT


@dataclass(frozen=True)
class Atom:
    """A predicate (or function) applied to variables, objects or constants."""

    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @property
    def is_equality(self) -> bool:
        return self.predicate == EQUALITY

    def substitute(self, binding: dict[str, str]) -> "Atom":
        return Atom(self.predicate, tuple(binding.get(a, a) for a in self.args))


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"(not {self.atom})" if self.negated else str(self.atom)

    def substitute(self, binding: dict[str, str]) -> "Literal":
        return Literal(self.atom.substitute(binding), self.negated)


@dataclass(frozen=True)
class PredicateSignature:
    name: str
    parameters: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.parameters)


@dataclass(frozen=True)
class FunctionSignature:
    """A numeric function; only cost functions are accepted by the parser."""

    name: str
    parameters: tuple[TypedName, ...] = ()


@dataclass(frozen=True)
class CostEffect:
    """``(increase <function> <amount>)`` where amount is a literal or a static term."""

    function: Atom
    amount: Union[int, Atom]


@dataclass(frozen=True)
class ActionSchema:
    """
    A lifted action.

    Effects keep their source order; ``add_effects`` and ``delete_effects``
    are the two views the semantics work with.
    """

    name: str
    parameters: tuple[TypedName, ...] = ()
    precondition: tuple[Literal, ...] = ()
    effects: tuple[Literal, ...] = ()
    cost: Optional[CostEffect] = None

    @property
    def add_effects(self) -> tuple[Atom, ...]:
        return tuple(e.atom for e in self.effects if not e.negated)

    @property
    def delete_effects(self) -> tuple[Atom, ...]:
        return tuple(e.atom for e in self.effects if e.negated)

    @property
    def arity(self) -> int:
        return len(self.parameters)


@dataclass(frozen=True)
class Domain:
    """A parsed domain. ``types`` holds (name, parent) pairs; ``object`` is implicit."""

    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    constants: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateSignature, ...] = ()
    functions: tuple[FunctionSignature, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    @cached_property
    def parent_of(self) -> dict[str, str]:
        return dict(self.types)

    @property
    def type_names(self) -> set[str]:
        return {OBJECT} | {name for name, _ in self.types}

    @cached_property
    def _actions_by_name(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}

    @cached_property
    def _predicates_by_name(self) -> dict[str, PredicateSignature]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def _functions_by_name(self) -> dict[str, FunctionSignature]:
        return {f.name: f for f in self.functions}

    def get_action(self, name: str) -> Optional[ActionSchema]:
        return self._actions_by_name.get(name.lower())

    def get_predicate(self, name: str) -> Optional[PredicateSignature]:
        return self._predicates_by_name.get(name.lower())

    def get_function(self, name: str) -> Optional[FunctionSignature]:
        return self._functions_by_name.get(name.lower())

    def ancestors(self, type_name: str) -> list[str]:
        """Parent chain of ``type_name``, starting with itself and ending at ``object``."""
        chain = [type_name]
        current = type_name
        while current != OBJECT:
            current = self.parent_of.get(current, OBJECT)
            chain.append(current)
        return chain

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    @property
    def has_action_costs(self) -> bool:
        return ":action-costs" in self.requirements or any(
            a.cost is not None for a in self.actions
        )


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: tuple[TypedName, ...] = ()
    init: tuple[Atom, ...] = ()
    goal: tuple[Literal, ...] = ()
    function_values: tuple[tuple[Atom, int], ...] = ()
    metric: Optional[tuple[str, Atom]] = None

    @property
    def object_names(self) -> list[str]:
        return [o.name for o in self.objects]


@dataclass(frozen=True)
class PlanStep:
    timestamp: int
    action: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.action})"
        return f"({self.action} {' '.join(self.args)})"


@dataclass(frozen=True)
class TimedPlan:
    """A sequential plan; ``terminated`` records an ``END`` marker in the source."""

    steps: tuple[PlanStep, ...] = ()
    terminated: bool = False

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def actions(self) -> list[tuple[str, tuple[str, ...]]]:
        return [(s.action, s.args) for s in self.steps]

    @classmethod
    def from_actions(
        cls, actions: list[tuple[str, tuple[str, ...]]], terminated: bool = True
    ) -> "TimedPlan":
        """Number steps 1..k, the canonical timestamp scheme of this toolchain."""
        steps = tuple(
            PlanStep(i, name.lower(), tuple(a.lower() for a in args))
            for i, (name, args) in enumerate(actions, start=1)
        )
        return cls(steps=steps, terminated=terminated)
