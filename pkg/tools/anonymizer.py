"""Instance-wise symbol anonymisation of (domain, problem, plan) tuples.

Every action, predicate, object and type name is replaced by a synthetic
symbol (``a_0``, ``p_3``, ``o_7``, ``t_1``). Counters follow the order of first
occurrence in the canonical render of the domain, then the problem, then the
plan, so the mapping depends only on the tuple itself.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from planning.model import (
    OBJECT,
    ActionSchema,
    Atom,
    CostEffect,
    Domain,
    FunctionSignature,
    Literal,
    PlanStep,
    PredicateSignature,
    Problem,
    TimedPlan,
    TypedName,
)

logger = logging.getLogger(__name__)

ANON_DOMAIN = "anon-domain"
ANON_PROBLEM = "anon-problem"

PREFIXES = {"actions": "a_", "predicates": "p_", "objects": "o_", "types": "t_"}


class InconsistentTuple(ValueError):
    """The plan references an action or object the domain and problem do not declare."""


@dataclass
class SymbolMap:
    """Per-category bijections original name -> synthetic name."""

    actions: dict[str, str] = field(default_factory=dict)
    predicates: dict[str, str] = field(default_factory=dict)
    objects: dict[str, str] = field(default_factory=dict)
    types: dict[str, str] = field(default_factory=dict)

    def register(self, category: str, name: str) -> None:
        mapping: dict[str, str] = getattr(self, category)
        if name not in mapping:
            mapping[name] = f"{PREFIXES[category]}{len(mapping)}"

    def type_name(self, name: str) -> str:
        return name if name == OBJECT else self.types[name]

    def to_dict(self) -> dict[str, Any]:
        return {
            "actions": dict(self.actions),
            "predicates": dict(self.predicates),
            "objects": dict(self.objects),
            "types": dict(self.types),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SymbolMap":
        return cls(
            actions=dict(data.get("actions", {})),
            predicates=dict(data.get("predicates", {})),
            objects=dict(data.get("objects", {})),
            types=dict(data.get("types", {})),
        )

    def inverse(self) -> "SymbolMap":
        return SymbolMap(
            actions={v: k for k, v in self.actions.items()},
            predicates={v: k for k, v in self.predicates.items()},
            objects={v: k for k, v in self.objects.items()},
            types={v: k for k, v in self.types.items()},
        )

    def rename_plan(self, plan: TimedPlan) -> TimedPlan:
        steps = []
        for step in plan.steps:
            if step.action not in self.actions:
                raise InconsistentTuple(f"plan uses undeclared action {step.action}")
            for arg in step.args:
                if arg not in self.objects:
                    raise InconsistentTuple(f"plan uses undeclared object {arg}")
            steps.append(
                PlanStep(
                    step.timestamp,
                    self.actions[step.action],
                    tuple(self.objects[a] for a in step.args),
                )
            )
        return TimedPlan(tuple(steps), plan.terminated)

    def restore_plan(self, plan: TimedPlan) -> TimedPlan:
        """Map a plan over synthetic symbols back to the original names."""
        return self.inverse().rename_plan(plan)


# ---------------------------------------------------------------------------
# first-occurrence registration, mirroring planning.render
# ---------------------------------------------------------------------------

def _register_typed(symbols: SymbolMap, entries, name_category: Optional[str]) -> None:
    if all(e.type == OBJECT for e in entries):
        if name_category:
            for e in entries:
                symbols.register(name_category, e.name)
        return
    groups: list[tuple[str, list[str]]] = []
    for e in entries:
        if groups and groups[-1][0] == e.type:
            groups[-1][1].append(e.name)
        else:
            groups.append((e.type, [e.name]))
    for type_name, names in groups:
        if name_category:
            for name in names:
                symbols.register(name_category, name)
        if type_name != OBJECT:
            symbols.register("types", type_name)


def _register_atom(symbols: SymbolMap, atom: Atom) -> None:
    if not atom.is_equality:
        symbols.register("predicates", atom.predicate)
    for arg in atom.args:
        if not arg.startswith("?"):
            symbols.register("objects", arg)


def _register_domain(symbols: SymbolMap, domain: Domain) -> None:
    groups: list[tuple[str, list[str]]] = []
    for name, parent in domain.types:
        if groups and groups[-1][0] == parent:
            groups[-1][1].append(name)
        else:
            groups.append((parent, [name]))
    for parent, names in groups:
        for name in names:
            symbols.register("types", name)
        if parent != OBJECT:
            symbols.register("types", parent)

    _register_typed(symbols, domain.constants, "objects")
    for predicate in domain.predicates:
        symbols.register("predicates", predicate.name)
        _register_typed(symbols, predicate.parameters, None)
    for function in domain.functions:
        _register_typed(symbols, function.parameters, None)
    for action in domain.actions:
        symbols.register("actions", action.name)
        _register_typed(symbols, action.parameters, None)
        for lit in action.precondition:
            _register_atom(symbols, lit.atom)
        for lit in action.effects:
            _register_atom(symbols, lit.atom)
        if action.cost is not None:
            for arg in action.cost.function.args:
                if not arg.startswith("?"):
                    symbols.register("objects", arg)
            if isinstance(action.cost.amount, Atom):
                for arg in action.cost.amount.args:
                    if not arg.startswith("?"):
                        symbols.register("objects", arg)


def _register_problem(symbols: SymbolMap, problem: Problem) -> None:
    _register_typed(symbols, problem.objects, "objects")
    for atom in problem.init:
        _register_atom(symbols, atom)
    for term, _ in problem.function_values:
        for arg in term.args:
            symbols.register("objects", arg)
    for lit in problem.goal:
        _register_atom(symbols, lit.atom)
    if problem.metric is not None:
        for arg in problem.metric[1].args:
            symbols.register("objects", arg)


# ---------------------------------------------------------------------------
# rewriting
# ---------------------------------------------------------------------------

def _rename_atom(symbols: SymbolMap, atom: Atom, variables: dict[str, str]) -> Atom:
    predicate = atom.predicate if atom.is_equality else symbols.predicates[atom.predicate]
    return Atom(predicate, tuple(_rename_term(symbols, a, variables) for a in atom.args))


def _rename_term(symbols: SymbolMap, term: str, variables: dict[str, str]) -> str:
    if term.startswith("?"):
        return variables[term]
    return symbols.objects[term]


def _rename_function_term(symbols: SymbolMap, term: Atom, variables: dict[str, str]) -> Atom:
    return Atom(term.predicate, tuple(_rename_term(symbols, a, variables) for a in term.args))


def _alpha(parameters) -> dict[str, str]:
    return {p.name: f"?x{i}" for i, p in enumerate(parameters)}


def _rename_parameters(symbols: SymbolMap, parameters, variables) -> tuple[TypedName, ...]:
    return tuple(TypedName(variables[p.name], symbols.type_name(p.type)) for p in parameters)


def _rename_action(symbols: SymbolMap, action: ActionSchema) -> ActionSchema:
    variables = _alpha(action.parameters)
    cost = None
    if action.cost is not None:
        amount = action.cost.amount
        if isinstance(amount, Atom):
            amount = _rename_function_term(symbols, amount, variables)
        cost = CostEffect(_rename_function_term(symbols, action.cost.function, variables), amount)
    return ActionSchema(
        name=symbols.actions[action.name],
        parameters=_rename_parameters(symbols, action.parameters, variables),
        precondition=tuple(
            Literal(_rename_atom(symbols, lit.atom, variables), lit.negated)
            for lit in action.precondition
        ),
        effects=tuple(
            Literal(_rename_atom(symbols, lit.atom, variables), lit.negated)
            for lit in action.effects
        ),
        cost=cost,
    )


def rename_domain(domain: Domain, symbols: SymbolMap) -> Domain:
    predicates = []
    for p in domain.predicates:
        variables = _alpha(p.parameters)
        predicates.append(
            PredicateSignature(symbols.predicates[p.name], _rename_parameters(symbols, p.parameters, variables))
        )
    functions = []
    for f in domain.functions:
        variables = _alpha(f.parameters)
        functions.append(FunctionSignature(f.name, _rename_parameters(symbols, f.parameters, variables)))
    return Domain(
        name=ANON_DOMAIN,
        requirements=domain.requirements,
        types=tuple((symbols.types[n], symbols.type_name(p)) for n, p in domain.types),
        constants=tuple(
            TypedName(symbols.objects[c.name], symbols.type_name(c.type)) for c in domain.constants
        ),
        predicates=tuple(predicates),
        functions=tuple(functions),
        actions=tuple(_rename_action(symbols, a) for a in domain.actions),
    )


def rename_problem(problem: Problem, symbols: SymbolMap) -> Problem:
    metric = None
    if problem.metric is not None:
        metric = (problem.metric[0], _rename_function_term(symbols, problem.metric[1], {}))
    return Problem(
        name=ANON_PROBLEM,
        domain_name=ANON_DOMAIN,
        objects=tuple(
            TypedName(symbols.objects[o.name], symbols.type_name(o.type)) for o in problem.objects
        ),
        init=tuple(_rename_atom(symbols, a, {}) for a in problem.init),
        goal=tuple(Literal(_rename_atom(symbols, l.atom, {}), l.negated) for l in problem.goal),
        function_values=tuple(
            (_rename_function_term(symbols, t, {}), v) for t, v in problem.function_values
        ),
        metric=metric,
    )


def build_symbol_map(domain: Domain, problem: Problem, plan: Optional[TimedPlan] = None) -> SymbolMap:
    """First-occurrence SymbolMap of a tuple; the plan must only use declared symbols."""
    symbols = SymbolMap()
    _register_domain(symbols, domain)
    _register_problem(symbols, problem)
    if plan is not None:
        for step in plan.steps:
            if step.action not in symbols.actions:
                raise InconsistentTuple(f"plan uses undeclared action {step.action}")
            for arg in step.args:
                if arg not in symbols.objects:
                    raise InconsistentTuple(f"plan uses undeclared object {arg}")
    return symbols


def anonymize_tuple(
    domain: Domain, problem: Problem, plan: TimedPlan, seed: int = 0
) -> tuple[Domain, Problem, TimedPlan, SymbolMap]:
    """
    Anonymise one tuple.

    ``seed`` does not influence the result: renaming is occurrence-ordered.
    It is accepted so callers can switch to randomised schemes without
    changing signatures.

    Raises:
        InconsistentTuple: When the plan references undeclared symbols
    """
    symbols = build_symbol_map(domain, problem, plan)
    return (
        rename_domain(domain, symbols),
        rename_problem(problem, symbols),
        symbols.rename_plan(plan),
        symbols,
    )


__all__ = [
    "SymbolMap",
    "InconsistentTuple",
    "anonymize_tuple",
    "build_symbol_map",
    "rename_domain",
    "rename_problem",
    "ANON_DOMAIN",
    "ANON_PROBLEM",
]
