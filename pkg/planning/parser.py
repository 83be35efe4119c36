"""Recursive-descent parser from s-expressions to the PDDL model.

Supports ``:strips``, ``:typing``, ``:negative-preconditions``, ``:equality``
and ``:action-costs``. Everything else is rejected with ``UnsupportedFeature``.
"""

import logging
import re
from typing import Optional, Sequence, Union

from planning.errors import (
    BindingError,
    DomainMismatch,
    LexError,
    NonMonotonicTimestamps,
    PlanFormatError,
    StructureError,
    UnsupportedFeature,
)
from planning.lexer import SExpr, SList, Symbol, read_sexprs
from planning.model import (
    EQUALITY,
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
from utils.identifiers import is_name, is_variable

logger = logging.getLogger(__name__)

SUPPORTED_REQUIREMENTS = (
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":equality",
    ":action-costs",
)

UNSUPPORTED_REQUIREMENTS = (
    ":adl",
    ":conditional-effects",
    ":constraints",
    ":continuous-effects",
    ":derived-predicates",
    ":disjunctive-preconditions",
    ":duration-inequalities",
    ":durative-actions",
    ":existential-preconditions",
    ":fluents",
    ":numeric-fluents",
    ":object-fluents",
    ":preferences",
    ":quantified-preconditions",
    ":timed-initial-literals",
    ":universal-preconditions",
)

UNSUPPORTED_SECTIONS = (":durative-action", ":derived", ":constraints", ":process", ":event")

UNSUPPORTED_CONNECTIVES = ("or", "imply", "exists", "forall", "preference", "when")
NUMERIC_COMPARISONS = ("<", ">", "<=", ">=")
NUMERIC_EFFECTS = ("decrease", "assign", "scale-up", "scale-down")

_INTEGER_RE = re.compile(r"^\d+$")
_NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?$")


# ---------------------------------------------------------------------------
# s-expression helpers
# ---------------------------------------------------------------------------

def _pos(node: SExpr) -> dict:
    return {"line": node.line, "column": node.column}


def _expect_list(node: SExpr, what: str) -> SList:
    if not isinstance(node, SList):
        raise StructureError(f"expected a list for {what}, found '{node.value}'", **_pos(node))
    return node


def _expect_symbol(node: SExpr, what: str) -> str:
    if not isinstance(node, Symbol):
        raise StructureError(f"expected a symbol for {what}, found a list", **_pos(node))
    return node.value


def _expect_name(node: SExpr, what: str) -> str:
    value = _expect_symbol(node, what)
    if not is_name(value):
        raise StructureError(f"illegal {what} '{value}'", **_pos(node))
    return value


def _head(node: SList) -> Optional[str]:
    if len(node) and isinstance(node[0], Symbol):
        return node[0].value
    return None


def _single_define(text, kind: str) -> SList:
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise StructureError(f"expected exactly one (define ({kind} ...)) form, found {len(forms)}")
    root = _expect_list(forms[0], "define form")
    if _head(root) != "define" or len(root) < 2:
        raise StructureError("expected (define ...)", **_pos(root))
    header = _expect_list(root[1], f"({kind} <name>) header")
    if _head(header) != kind or len(header) != 2:
        raise StructureError(f"expected ({kind} <name>) header", **_pos(header))
    return root


def _parse_typed_list(
    items: Sequence[SExpr], what: str, variables: bool
) -> list[TypedName]:
    """
    Parse ``a b - t c - u d`` into typed names; untyped trailing names are ``object``.

    Raises:
        StructureError: On malformed lists or illegal names
        UnsupportedFeature: On ``(either ...)`` types
    """
    result: list[TypedName] = []
    pending: list[str] = []
    index = 0
    while index < len(items):
        node = items[index]
        if isinstance(node, SList):
            raise StructureError(f"unexpected list in {what}", **_pos(node))
        if node.value == "-":
            if not pending:
                raise StructureError(f"'-' without names in {what}", **_pos(node))
            if index + 1 >= len(items):
                raise StructureError(f"missing type after '-' in {what}", **_pos(node))
            type_node = items[index + 1]
            if isinstance(type_node, SList):
                if _head(type_node) == "either":
                    raise UnsupportedFeature("either-types are not supported", **_pos(type_node))
                raise StructureError(f"malformed type in {what}", **_pos(type_node))
            type_name = _expect_name(type_node, "type name")
            result.extend(TypedName(name, type_name) for name in pending)
            pending = []
            index += 2
            continue
        if variables:
            if not is_variable(node.value):
                raise StructureError(f"expected a ?variable in {what}, found '{node.value}'", **_pos(node))
        elif not is_name(node.value):
            raise StructureError(f"illegal name '{node.value}' in {what}", **_pos(node))
        pending.append(node.value)
        index += 1
    result.extend(TypedName(name, OBJECT) for name in pending)
    return result


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------

class _Scope:
    """Name resolution for atoms inside a schema (lifted) or a problem (ground)."""

    def __init__(
        self,
        domain_predicates: dict[str, PredicateSignature],
        domain: Optional[Domain],
        terms: dict[str, str],
        lifted: bool,
        type_check,
    ):
        self.predicates = domain_predicates
        self.domain = domain
        self.terms = terms  # name -> type for variables, constants and objects
        self.lifted = lifted
        self.type_check = type_check

    def term(self, node: SExpr, atom_text: str) -> str:
        if isinstance(node, SList):
            raise UnsupportedFeature(
                f"function terms are not allowed in {atom_text}", **_pos(node)
            )
        value = node.value
        if value not in self.terms:
            if is_variable(value):
                raise BindingError(f"unbound variable {value} in {atom_text}", **_pos(node))
            raise BindingError(f"undeclared object {value} in {atom_text}", **_pos(node))
        return value

    def atom(self, node: SList) -> Atom:
        name = _expect_symbol(node[0], "predicate name") if len(node) else None
        if name is None:
            raise StructureError("empty atom", **_pos(node))
        text = repr(node)
        if name == EQUALITY:
            if len(node) != 3:
                raise StructureError(f"equality needs two terms: {text}", **_pos(node))
            return Atom(EQUALITY, tuple(self.term(arg, text) for arg in node[1:]))
        signature = self.predicates.get(name)
        if signature is None:
            raise BindingError(f"undeclared predicate in {text}", **_pos(node))
        args = tuple(self.term(arg, text) for arg in node[1:])
        if len(args) != signature.arity:
            raise BindingError(
                f"{text} has {len(args)} arguments, predicate {name} expects {signature.arity}",
                **_pos(node),
            )
        for position, (arg, param) in enumerate(zip(args, signature.parameters), start=1):
            if self.lifted and is_variable(arg):
                continue
            actual = self.terms[arg]
            if not self.type_check(actual, param.type):
                raise BindingError(
                    f"{text}: argument {position} '{arg}' is a {actual}, expected {param.type}",
                    **_pos(node),
                )
        return Atom(name, args)


def _parse_condition(node: SExpr, scope: _Scope) -> list[Literal]:
    """Flatten a conjunction of literals; equality atoms are kept as literals."""
    node = _expect_list(node, "condition")
    if len(node) == 0:
        return []
    head = _head(node)
    if head is None:
        raise StructureError("condition must start with a symbol", **_pos(node))
    if head == "and":
        literals: list[Literal] = []
        for child in node[1:]:
            literals.extend(_parse_condition(child, scope))
        return literals
    if head == "not":
        if len(node) != 2:
            raise StructureError("(not ...) takes exactly one argument", **_pos(node))
        inner = _expect_list(node[1], "negated atom")
        inner_head = _head(inner)
        if inner_head in ("and", "not") or inner_head in UNSUPPORTED_CONNECTIVES:
            raise UnsupportedFeature(f"negation of a compound condition: {node!r}", **_pos(node))
        if inner_head in NUMERIC_COMPARISONS:
            raise UnsupportedFeature(f"numeric condition {node!r}", **_pos(node))
        return [Literal(scope.atom(inner), negated=True)]
    if head in UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(f"'{head}' conditions are not supported", **_pos(node))
    if head in NUMERIC_COMPARISONS:
        raise UnsupportedFeature(f"numeric condition {node!r}", **_pos(node))
    return [Literal(scope.atom(node))]


# ---------------------------------------------------------------------------
# domain
# ---------------------------------------------------------------------------

def _parse_requirements(section: SList) -> tuple[str, ...]:
    requirements = []
    for node in section[1:]:
        flag = _expect_symbol(node, "requirement")
        if flag in UNSUPPORTED_REQUIREMENTS:
            raise UnsupportedFeature(f"requirement {flag} is not supported", **_pos(node))
        if flag not in SUPPORTED_REQUIREMENTS:
            raise StructureError(f"unknown requirement {flag}", **_pos(node))
        if flag not in requirements:
            requirements.append(flag)
    return tuple(requirements)


def _parse_types(section: SList) -> list[tuple[str, str]]:
    declared = _parse_typed_list(section[1:], "type declarations", variables=False)
    types: list[tuple[str, str]] = []
    seen: set[str] = set()
    for entry in declared:
        if entry.name == OBJECT:
            if entry.type != OBJECT:
                raise StructureError("the built-in type object cannot have a parent", **_pos(section))
            continue
        if entry.name in seen:
            raise StructureError(f"duplicate type {entry.name}", **_pos(section))
        seen.add(entry.name)
        types.append((entry.name, entry.type))

    # Parents used but never declared become direct subtypes of object
    for _, parent in list(types):
        if parent != OBJECT and parent not in seen:
            seen.add(parent)
            types.append((parent, OBJECT))

    parent_of = dict(types)
    for name in parent_of:
        visited = {name}
        current = parent_of[name]
        while current != OBJECT:
            if current in visited:
                raise StructureError(f"type hierarchy cycle through {name}", **_pos(section))
            visited.add(current)
            current = parent_of.get(current, OBJECT)
    return types


def _parse_predicates(section: SList, type_names: set[str]) -> list[PredicateSignature]:
    predicates = []
    seen: set[str] = set()
    for node in section[1:]:
        node = _expect_list(node, "predicate declaration")
        if not len(node):
            raise StructureError("empty predicate declaration", **_pos(node))
        name = _expect_name(node[0], "predicate name")
        if name in seen:
            raise StructureError(f"duplicate predicate {name}", **_pos(node))
        seen.add(name)
        params = _parse_typed_list(node[1:], f"predicate {name}", variables=True)
        _check_types_declared(params, type_names, f"predicate {name}", node)
        _check_unique_variables(params, f"predicate {name}", node)
        predicates.append(PredicateSignature(name, tuple(params)))
    return predicates


def _parse_functions(section: SList, type_names: set[str]) -> list[FunctionSignature]:
    functions = []
    seen: set[str] = set()
    items = section[1:]
    index = 0
    while index < len(items):
        node = items[index]
        if isinstance(node, Symbol):
            if node.value != "-" or index + 1 >= len(items):
                raise StructureError(f"unexpected '{node.value}' in :functions", **_pos(node))
            if _expect_symbol(items[index + 1], "function type") != "number":
                raise UnsupportedFeature("only numeric cost functions are supported", **_pos(node))
            index += 2
            continue
        if not len(node):
            raise StructureError("empty function declaration", **_pos(node))
        name = _expect_name(node[0], "function name")
        if name in seen:
            raise StructureError(f"duplicate function {name}", **_pos(node))
        seen.add(name)
        params = _parse_typed_list(node[1:], f"function {name}", variables=True)
        _check_types_declared(params, type_names, f"function {name}", node)
        functions.append(FunctionSignature(name, tuple(params)))
        index += 1
    return functions


def _check_types_declared(params, type_names, what, node):
    for p in params:
        if p.type not in type_names:
            raise BindingError(f"undeclared type {p.type} in {what}", **_pos(node))


def _check_unique_variables(params, what, node):
    names = [p.name for p in params]
    if len(names) != len(set(names)):
        raise StructureError(f"duplicate parameter name in {what}", **_pos(node))


def _parse_function_term(
    node: SList, functions: dict[str, FunctionSignature], terms: dict[str, str]
) -> Atom:
    name = _expect_symbol(node[0], "function name") if len(node) else None
    signature = functions.get(name) if name else None
    if signature is None:
        raise BindingError(f"undeclared function in {node!r}", **_pos(node))
    args = []
    for arg in node[1:]:
        value = _expect_symbol(arg, "function argument")
        if value not in terms:
            raise BindingError(f"unbound term {value} in {node!r}", **_pos(arg))
        args.append(value)
    if len(args) != len(signature.parameters):
        raise BindingError(f"{node!r} has wrong arity for function {name}", **_pos(node))
    return Atom(name, tuple(args))


def _parse_effect(
    node: SExpr,
    scope: _Scope,
    functions: dict[str, FunctionSignature],
    effects: list[Literal],
    costs: list[CostEffect],
):
    node = _expect_list(node, "effect")
    if len(node) == 0:
        return
    head = _head(node)
    if head is None:
        raise StructureError("effect must start with a symbol", **_pos(node))
    if head == "and":
        for child in node[1:]:
            _parse_effect(child, scope, functions, effects, costs)
        return
    if head in ("when", "forall"):
        raise UnsupportedFeature(f"'{head}' effects are not supported", **_pos(node))
    if head in NUMERIC_EFFECTS:
        raise UnsupportedFeature(f"numeric effect '{head}' is not supported", **_pos(node))
    if head == "increase":
        if len(node) != 3:
            raise StructureError("(increase <function> <amount>) expected", **_pos(node))
        target = _parse_function_term(_expect_list(node[1], "cost function"), functions, scope.terms)
        if functions[target.predicate].parameters:
            raise UnsupportedFeature(
                f"only 0-ary cost functions may be increased: {node!r}", **_pos(node)
            )
        amount_node = node[2]
        if isinstance(amount_node, SList):
            amount: Union[int, Atom] = _parse_function_term(amount_node, functions, scope.terms)
        else:
            if not _INTEGER_RE.match(amount_node.value):
                raise UnsupportedFeature(
                    f"cost amount must be a non-negative integer: {node!r}", **_pos(node)
                )
            amount = int(amount_node.value)
        costs.append(CostEffect(target, amount))
        return
    if head == "not":
        if len(node) != 2:
            raise StructureError("(not ...) takes exactly one argument", **_pos(node))
        inner = _expect_list(node[1], "deleted atom")
        if _head(inner) in ("and", "not", EQUALITY):
            raise StructureError(f"illegal delete effect {node!r}", **_pos(node))
        effects.append(Literal(scope.atom(inner), negated=True))
        return
    if head == EQUALITY:
        raise StructureError(f"equality cannot be an effect: {node!r}", **_pos(node))
    effects.append(Literal(scope.atom(node)))


def _parse_action(
    section: SList,
    domain_stub: Domain,
    predicates: dict[str, PredicateSignature],
    functions: dict[str, FunctionSignature],
    constants: dict[str, str],
) -> ActionSchema:
    if len(section) < 2:
        raise StructureError("action without a name", **_pos(section))
    name = _expect_name(section[1], "action name")
    fields: dict[str, SExpr] = {}
    index = 2
    while index < len(section):
        key = _expect_symbol(section[index], f"action {name} keyword")
        if key not in (":parameters", ":precondition", ":effect"):
            raise StructureError(f"unknown key {key} in action {name}", **_pos(section[index]))
        if key in fields:
            raise StructureError(f"duplicate {key} in action {name}", **_pos(section[index]))
        if index + 1 >= len(section):
            raise StructureError(f"missing value for {key} in action {name}", **_pos(section[index]))
        fields[key] = section[index + 1]
        index += 2

    params: list[TypedName] = []
    if ":parameters" in fields:
        param_list = _expect_list(fields[":parameters"], f"parameters of {name}")
        params = _parse_typed_list(param_list.items, f"parameters of {name}", variables=True)
        _check_types_declared(params, domain_stub.type_names, f"action {name}", section)
        _check_unique_variables(params, f"action {name}", section)

    terms = dict(constants)
    terms.update({p.name: p.type for p in params})
    scope = _Scope(predicates, domain_stub, terms, lifted=True, type_check=domain_stub.is_subtype)

    precondition: list[Literal] = []
    if ":precondition" in fields:
        precondition = _parse_condition(fields[":precondition"], scope)

    effects: list[Literal] = []
    costs: list[CostEffect] = []
    if ":effect" in fields:
        _parse_effect(fields[":effect"], scope, functions, effects, costs)
    if len(costs) > 1:
        raise StructureError(f"action {name} has more than one cost effect", **_pos(section))

    added = {e.atom for e in effects if not e.negated}
    for e in effects:
        if e.negated and e.atom in added:
            raise StructureError(
                f"action {name} both adds and deletes {e.atom}", **_pos(section)
            )

    return ActionSchema(
        name=name,
        parameters=tuple(params),
        precondition=tuple(precondition),
        effects=tuple(effects),
        cost=costs[0] if costs else None,
    )


def parse_domain(text: Union[str, bytes]) -> Domain:
    """
    Parse a PDDL domain.

    Args:
        text: Domain source text

    Returns:
        Domain satisfying the type-tree, uniqueness and binding invariants

    Raises:
        LexError, StructureError, UnsupportedFeature, BindingError
    """
    root = _single_define(text, "domain")
    name = _expect_name(root[1][1], "domain name")

    sections: dict[str, SList] = {}
    action_sections: list[SList] = []
    for node in root[2:]:
        section = _expect_list(node, "domain section")
        key = _head(section)
        if key is None:
            raise StructureError("section must start with a keyword", **_pos(section))
        if key in UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(f"section {key} is not supported", **_pos(section))
        if key == ":action":
            action_sections.append(section)
            continue
        if key not in (":requirements", ":types", ":constants", ":predicates", ":functions"):
            raise StructureError(f"unknown domain section {key}", **_pos(section))
        if key in sections:
            raise StructureError(f"duplicate section {key}", **_pos(section))
        sections[key] = section

    requirements = _parse_requirements(sections[":requirements"]) if ":requirements" in sections else ()
    types = _parse_types(sections[":types"]) if ":types" in sections else []
    stub = Domain(name=name, types=tuple(types))

    constants: list[TypedName] = []
    if ":constants" in sections:
        constants = _parse_typed_list(sections[":constants"][1:], "constants", variables=False)
        _check_types_declared(constants, stub.type_names, "constants", sections[":constants"])
        if len({c.name for c in constants}) != len(constants):
            raise StructureError("duplicate constant", **_pos(sections[":constants"]))

    predicates = _parse_predicates(sections[":predicates"], stub.type_names) if ":predicates" in sections else []
    functions = _parse_functions(sections[":functions"], stub.type_names) if ":functions" in sections else []

    predicate_index = {p.name: p for p in predicates}
    function_index = {f.name: f for f in functions}
    constant_types = {c.name: c.type for c in constants}

    actions: list[ActionSchema] = []
    seen_actions: set[str] = set()
    for section in action_sections:
        action = _parse_action(section, stub, predicate_index, function_index, constant_types)
        if action.name in seen_actions:
            raise StructureError(f"duplicate action {action.name}", **_pos(section))
        seen_actions.add(action.name)
        actions.append(action)

    return Domain(
        name=name,
        requirements=requirements,
        types=tuple(types),
        constants=tuple(constants),
        predicates=tuple(predicates),
        functions=tuple(functions),
        actions=tuple(actions),
    )


# ---------------------------------------------------------------------------
# problem
# ---------------------------------------------------------------------------

def _parse_number(node: SExpr) -> int:
    value = _expect_symbol(node, "number")
    if not _NUMBER_RE.match(value):
        raise StructureError(f"expected a number, found '{value}'", **_pos(node))
    number = float(value)
    if number != int(number) or number < 0:
        raise UnsupportedFeature(
            f"only non-negative integer function values are supported, found {value}", **_pos(node)
        )
    return int(number)


def parse_problem(
    text: Union[str, bytes], domain: Domain, strict_domain_name: bool = False
) -> Problem:
    """
    Parse a PDDL problem against ``domain``.

    Args:
        text: Problem source text
        domain: The domain the problem instantiates
        strict_domain_name: Raise instead of warning when (:domain ...) differs

    Returns:
        Problem whose objects, init and goal are bound and type-checked

    Raises:
        LexError, StructureError, UnsupportedFeature, BindingError, DomainMismatch
    """
    root = _single_define(text, "problem")
    name = _expect_name(root[1][1], "problem name")

    sections: dict[str, SList] = {}
    for node in root[2:]:
        section = _expect_list(node, "problem section")
        key = _head(section)
        if key not in (":domain", ":requirements", ":objects", ":init", ":goal", ":metric"):
            if key in (":constraints",):
                raise UnsupportedFeature(f"section {key} is not supported", **_pos(section))
            raise StructureError(f"unknown problem section {key}", **_pos(section))
        if key in sections:
            raise StructureError(f"duplicate section {key}", **_pos(section))
        sections[key] = section

    if ":domain" not in sections or len(sections[":domain"]) != 2:
        raise StructureError("problem must declare (:domain <name>)")
    domain_name = _expect_name(sections[":domain"][1], "domain name")
    if domain_name != domain.name:
        message = f"problem {name} declares domain {domain_name}, parsed against {domain.name}"
        if strict_domain_name:
            raise DomainMismatch(message, **_pos(sections[":domain"]))
        logger.warning(message)

    if ":requirements" in sections:
        _parse_requirements(sections[":requirements"])

    objects: list[TypedName] = []
    if ":objects" in sections:
        objects = _parse_typed_list(sections[":objects"][1:], "objects", variables=False)
        for obj in objects:
            if obj.type not in domain.type_names:
                raise BindingError(
                    f"object {obj.name} has undeclared type {obj.type}", **_pos(sections[":objects"])
                )
    terms = {c.name: c.type for c in domain.constants}
    for obj in objects:
        if obj.name in terms:
            raise StructureError(f"duplicate object {obj.name}", **_pos(sections[":objects"]))
        terms[obj.name] = obj.type

    predicate_index = {p.name: p for p in domain.predicates}
    function_index = {f.name: f for f in domain.functions}
    scope = _Scope(predicate_index, domain, terms, lifted=False, type_check=domain.is_subtype)

    init: list[Atom] = []
    seen_init: set[Atom] = set()
    function_values: list[tuple[Atom, int]] = []
    seen_functions: set[Atom] = set()
    if ":init" in sections:
        for node in sections[":init"][1:]:
            node = _expect_list(node, "init atom")
            head = _head(node)
            if head == "not":
                raise StructureError("negative literals are not allowed in :init", **_pos(node))
            if head == EQUALITY and len(node) == 3 and isinstance(node[1], SList):
                term = _parse_function_term(node[1], function_index, terms)
                if term in seen_functions:
                    raise StructureError(f"function {term} initialised twice", **_pos(node))
                seen_functions.add(term)
                function_values.append((term, _parse_number(node[2])))
                continue
            if head == EQUALITY:
                raise StructureError(f"equality atoms are not allowed in :init: {node!r}", **_pos(node))
            atom = scope.atom(node)
            if atom not in seen_init:
                seen_init.add(atom)
                init.append(atom)

    if ":goal" not in sections or len(sections[":goal"]) != 2:
        raise StructureError("problem must declare (:goal <condition>)")
    goal = _parse_condition(sections[":goal"][1], scope)

    metric = None
    if ":metric" in sections:
        section = sections[":metric"]
        if len(section) != 3:
            raise StructureError("(:metric minimize|maximize <function>) expected", **_pos(section))
        direction = _expect_symbol(section[1], "metric direction")
        if direction not in ("minimize", "maximize"):
            raise StructureError(f"unknown metric direction {direction}", **_pos(section))
        expression = _expect_list(section[2], "metric expression")
        if _head(expression) in ("+", "-", "*", "/"):
            raise UnsupportedFeature("compound metric expressions are not supported", **_pos(section))
        metric = (direction, _parse_function_term(expression, function_index, terms))

    return Problem(
        name=name,
        domain_name=domain_name,
        objects=tuple(objects),
        init=tuple(init),
        goal=tuple(goal),
        function_values=tuple(function_values),
        metric=metric,
    )


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

_PLAN_LINE_RE = re.compile(r"^(\d+)\s*:\s*\(([^()]*)\)$")


def parse_plan(text: Union[str, bytes]) -> TimedPlan:
    """
    Parse a sequential plan in VAL's ``<digits>: (<name> <args>)`` format.

    Blank lines and ``;`` comments are ignored; a final ``END`` line sets
    ``terminated``.

    Raises:
        PlanFormatError: On malformed lines (reports the line number)
        NonMonotonicTimestamps: When timestamps do not strictly increase
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            raise PlanFormatError("plan is not valid UTF-8") from None
    if not isinstance(text, str):
        raise PlanFormatError(f"expected plan text, got {type(text).__name__}")

    steps: list[PlanStep] = []
    terminated = False
    previous: Optional[int] = None

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if terminated:
            raise PlanFormatError("content after END", line=line_number)
        if line.upper() == "END":
            terminated = True
            continue
        match = _PLAN_LINE_RE.match(line)
        if match is None:
            raise PlanFormatError(f"malformed plan line {raw.strip()!r}", line=line_number)
        tokens = match.group(2).split()
        if not tokens:
            raise PlanFormatError("empty action", line=line_number)
        tokens = [t.lower() for t in tokens]
        for token in tokens:
            if not is_name(token):
                raise PlanFormatError(f"illegal identifier {token!r}", line=line_number)
        timestamp = int(match.group(1))
        if previous is not None and timestamp <= previous:
            raise NonMonotonicTimestamps(
                f"timestamp {timestamp} does not follow {previous}", line=line_number
            )
        previous = timestamp
        steps.append(PlanStep(timestamp, tokens[0], tuple(tokens[1:])))

    return TimedPlan(steps=tuple(steps), terminated=terminated)


__all__ = [
    "parse_domain",
    "parse_problem",
    "parse_plan",
    "LexError",
    "SUPPORTED_REQUIREMENTS",
]
