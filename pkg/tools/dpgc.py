"""Domain-Problem Generation Configuration (DPGC): schema, model and static checks.

A DPGC is a JSON document describing how random problems of one domain are
built: object pools, ground invariants, and groups of predicate pools whose
arguments come from pools, literal objects, or tags published by earlier pools.
See ``docs/dpgc.md`` for the format.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from jsonschema import Draft7Validator

from planning.errors import PddlError
from planning.lexer import SList, Symbol, read_sexprs
from planning.model import Atom, Domain
from utils.fileio import read_text
from utils.identifiers import IdentifierValidator

logger = logging.getLogger(__name__)

SELECTION_MODES = ("exclusive", "sequential", "uniform")
GROUP_MODES = ("all", "exclusive-choice")

_COUNT_SCHEMA = {
    "oneOf": [
        {"type": "integer", "minimum": 0},
        {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
        {"type": "string", "pattern": "^(each|each-tag):[A-Za-z][A-Za-z0-9_\\-]*$"},
    ]
}

_SOURCE_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"required": ["pool"]},
        {"required": ["object"]},
        {"required": ["tag"]},
    ],
    "properties": {
        "pool": {"type": "string"},
        "object": {"type": "string"},
        "tag": {"type": "string"},
        "selection": {"enum": list(SELECTION_MODES)},
    },
    "dependencies": {"selection": ["pool"]},
    "additionalProperties": False,
}

_PREDICATE_POOL_SCHEMA = {
    "type": "object",
    "required": ["name", "predicate", "args"],
    "properties": {
        "name": {"type": "string"},
        "predicate": {"type": "string"},
        "count": _COUNT_SCHEMA,
        "args": {"type": "array", "items": _SOURCE_SCHEMA},
        "emits": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["tag", "position"],
                "properties": {
                    "tag": {"type": "string"},
                    "position": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "negated": {"type": "boolean"},
    },
    "additionalProperties": False,
}

_GROUP_SCHEMA = {
    "type": "object",
    "required": ["name", "members"],
    "properties": {
        "name": {"type": "string"},
        "mode": {"enum": list(GROUP_MODES)},
        "weights": {"type": "array", "items": {"type": "number"}},
        "members": {"type": "array", "items": _PREDICATE_POOL_SCHEMA, "minItems": 1},
    },
    "additionalProperties": False,
}

DPGC_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "DPGC",
    "type": "object",
    "required": ["domain", "object_pools"],
    "properties": {
        "domain": {"type": "string"},
        "object_pools": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "type", "count", "prefix"],
                "properties": {
                    "name": {"type": "string"},
                    "type": {"type": "string"},
                    "count": {
                        "oneOf": [
                            {"type": "integer", "minimum": 1},
                            {
                                "type": "array",
                                "items": {"type": "integer", "minimum": 1},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        ]
                    },
                    "prefix": {"type": "string"},
                    "selection": {"enum": list(SELECTION_MODES)},
                },
                "additionalProperties": False,
            },
        },
        "init_invariants": {"type": "array", "items": {"type": "string"}},
        "goal_invariants": {"type": "array", "items": {"type": "string"}},
        "init_groups": {"type": "array", "items": _GROUP_SCHEMA},
        "goal_groups": {"type": "array", "items": _GROUP_SCHEMA},
        "solvability": {
            "type": "object",
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["planner-check", "none"]},
                "max_expansions": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "max_retries": {"type": "integer", "minimum": 1},
        "reject_trivial": {"type": "boolean"},
    },
    "additionalProperties": False,
}


class InvalidDpgc(ValueError):
    """A DPGC document failed schema or semantic validation."""

    def __init__(self, diagnostics: list["Diagnostic"]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        where = f" [{self.location}]" if self.location else ""
        return f"{self.kind}: {self.message}{where}"


Count = Union[int, tuple[int, int], str]


@dataclass(frozen=True)
class ObjectPool:
    name: str
    type: str
    count: Union[int, tuple[int, int]]
    prefix: str
    selection: str = "uniform"

    @property
    def min_count(self) -> int:
        return self.count if isinstance(self.count, int) else self.count[0]

    @property
    def max_count(self) -> int:
        return self.count if isinstance(self.count, int) else self.count[1]

    def object_name(self, index: int) -> str:
        return f"{self.prefix}{index}"


@dataclass(frozen=True)
class ArgSource:
    """
    Where one argument comes from: ``pool``, ``object`` or ``tag``.

    ``selection`` overrides the pool's selection mode for this argument only.
    """

    kind: str
    ref: str
    selection: Optional[str] = None


@dataclass(frozen=True)
class TagEmit:
    tag: str
    position: int


@dataclass(frozen=True)
class PredicatePool:
    name: str
    predicate: str
    args: tuple[ArgSource, ...]
    count: Count = 1
    emits: tuple[TagEmit, ...] = ()
    negated: bool = False

    @property
    def consumes(self) -> tuple[tuple[str, int], ...]:
        return tuple((a.ref, i) for i, a in enumerate(self.args) if a.kind == "tag")


@dataclass(frozen=True)
class PoolGroup:
    name: str
    members: tuple[PredicatePool, ...]
    mode: str = "all"
    weights: tuple[float, ...] = ()


@dataclass(frozen=True)
class Solvability:
    DEFAULT_MAX_EXPANSIONS = 20_000

    mode: str = "planner-check"
    max_expansions: int = DEFAULT_MAX_EXPANSIONS


@dataclass(frozen=True)
class DpgcConfig:
    DEFAULT_MAX_RETRIES = 50

    domain: str
    object_pools: tuple[ObjectPool, ...] = ()
    init_invariants: tuple[str, ...] = ()
    goal_invariants: tuple[str, ...] = ()
    init_groups: tuple[PoolGroup, ...] = ()
    goal_groups: tuple[PoolGroup, ...] = ()
    solvability: Solvability = Solvability()
    max_retries: int = DEFAULT_MAX_RETRIES
    reject_trivial: bool = True

    def pool(self, name: str) -> Optional[ObjectPool]:
        return next((p for p in self.object_pools if p.name == name), None)

    def sampling_order(self) -> list[tuple[str, PoolGroup, PredicatePool]]:
        """(section, group, predicate pool) triples in the order the generator samples them."""
        order = []
        for section, groups in (("init", self.init_groups), ("goal", self.goal_groups)):
            for group in groups:
                for member in group.members:
                    order.append((section, group, member))
        return order


def check_document(document: Any) -> list[Diagnostic]:
    """Schema-level diagnostics for a raw JSON document."""
    validator = Draft7Validator(DPGC_SCHEMA)
    diagnostics = []
    for error in sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path)):
        location = "/".join(str(p) for p in error.absolute_path)
        diagnostics.append(Diagnostic("SchemaError", error.message, location))
    return diagnostics


def _count(value: Any) -> Count:
    if isinstance(value, list):
        return (int(value[0]), int(value[1]))
    return value


def _predicate_pool(raw: dict[str, Any]) -> PredicatePool:
    args = []
    for source in raw["args"]:
        kind = next(k for k in ("pool", "object", "tag") if k in source)
        ref = source[kind].lower() if kind == "object" else source[kind]
        args.append(ArgSource(kind, ref, source.get("selection")))
    return PredicatePool(
        name=raw["name"],
        predicate=raw["predicate"].lower(),
        args=tuple(args),
        count=_count(raw.get("count", 1)),
        emits=tuple(TagEmit(e["tag"], e["position"]) for e in raw.get("emits", [])),
        negated=raw.get("negated", False),
    )


def _group(raw: dict[str, Any]) -> PoolGroup:
    return PoolGroup(
        name=raw["name"],
        members=tuple(_predicate_pool(m) for m in raw["members"]),
        mode=raw.get("mode", "all"),
        weights=tuple(float(w) for w in raw.get("weights", [])),
    )


def from_dict(document: dict[str, Any]) -> DpgcConfig:
    """
    Build a DpgcConfig from a JSON document.

    Raises:
        InvalidDpgc: When the document does not match ``DPGC_SCHEMA``
    """
    diagnostics = check_document(document)
    if diagnostics:
        raise InvalidDpgc(diagnostics)
    solvability = document.get("solvability", {})
    return DpgcConfig(
        domain=document["domain"].lower(),
        object_pools=tuple(
            ObjectPool(
                name=p["name"],
                type=p["type"].lower(),
                count=_count(p["count"]),
                prefix=p["prefix"].lower(),
                selection=p.get("selection", "uniform"),
            )
            for p in document["object_pools"]
        ),
        init_invariants=tuple(document.get("init_invariants", [])),
        goal_invariants=tuple(document.get("goal_invariants", [])),
        init_groups=tuple(_group(g) for g in document.get("init_groups", [])),
        goal_groups=tuple(_group(g) for g in document.get("goal_groups", [])),
        solvability=Solvability(
            mode=solvability.get("mode", "planner-check"),
            max_expansions=solvability.get("max_expansions", Solvability.DEFAULT_MAX_EXPANSIONS),
        ),
        max_retries=document.get("max_retries", DpgcConfig.DEFAULT_MAX_RETRIES),
        reject_trivial=document.get("reject_trivial", True),
    )


def load_dpgc(path: Union[str, Path]) -> DpgcConfig:
    path = Path(path)
    try:
        document = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidDpgc([Diagnostic("SchemaError", f"invalid JSON: {e.msg}", str(path))]) from e
    return from_dict(document)


def parse_invariant(text: str, negated_allowed: bool = False) -> tuple[Atom, bool]:
    """
    Parse an invariant template such as ``"(empty)"`` or ``"(not (at c1 l1))"``.

    Returns:
        (atom, negated)

    Raises:
        PddlError: When the text is not a single flat atom
    """
    forms = read_sexprs(text)
    if len(forms) != 1 or not isinstance(forms[0], SList) or not len(forms[0]):
        raise PddlError(f"expected one atom, got {text!r}")
    node = forms[0]
    negated = False
    if isinstance(node[0], Symbol) and node[0].value == "not":
        if not negated_allowed or len(node) != 2 or not isinstance(node[1], SList):
            raise PddlError(f"negation not allowed here: {text!r}")
        node, negated = node[1], True
    if not all(isinstance(item, Symbol) for item in node):
        raise PddlError(f"nested terms in invariant {text!r}")
    return Atom(node[0].value, tuple(item.value for item in node[1:])), negated


# ---------------------------------------------------------------------------
# semantic validation
# ---------------------------------------------------------------------------

def _max_count(count: Count, config: DpgcConfig, tag_max: dict[str, int]) -> int:
    if isinstance(count, int):
        return count
    if isinstance(count, tuple):
        return count[1]
    kind, ref = count.split(":", 1)
    if kind == "each":
        pool = config.pool(ref)
        return pool.max_count if pool else 0
    return tag_max.get(ref, 0)


def validate_dpgc(config: DpgcConfig, domain: Domain) -> list[Diagnostic]:
    """
    Check a DPGC against its domain. Never raises; an empty list means usable.

    Diagnostic kinds: UnknownPredicate, TagUndefined, TagCycle, PoolExhaustible,
    TypeMismatch, plus DuplicateName, UnknownPool, UnknownType, ArityMismatch,
    TagOrder, InvalidWeights, UnknownObject.
    """
    diagnostics: list[Diagnostic] = []
    identifiers = IdentifierValidator()

    if config.domain != domain.name:
        logger.warning("DPGC targets domain %s, used with %s", config.domain, domain.name)

    # object pools
    object_types = {c.name: c.type for c in domain.constants}
    pool_names: set[str] = set()
    for pool in config.object_pools:
        where = f"object_pools/{pool.name}"
        if pool.name in pool_names:
            diagnostics.append(Diagnostic("DuplicateName", f"object pool {pool.name}", where))
        pool_names.add(pool.name)
        if pool.type not in domain.type_names:
            diagnostics.append(Diagnostic("UnknownType", f"type {pool.type} is not declared", where))
        if pool.min_count < 1 or pool.min_count > pool.max_count:
            diagnostics.append(Diagnostic("PoolExhaustible", f"invalid count range {pool.count}", where))
        if not identifiers.is_stem(pool.prefix):
            diagnostics.append(Diagnostic("SchemaError", f"illegal prefix {pool.prefix!r}", where))
        for index in range(1, pool.max_count + 1):
            name = pool.object_name(index)
            if name in object_types:
                diagnostics.append(
                    Diagnostic("DuplicateName", f"object {name} is generated twice", where)
                )
                break
            if index <= pool.min_count:
                object_types[name] = pool.type

    # Objects that exist in every instance (constants and the guaranteed pool prefix)
    guaranteed = dict(object_types)

    def check_atom(atom: Atom, where: str):
        signature = domain.get_predicate(atom.predicate)
        if signature is None:
            diagnostics.append(Diagnostic("UnknownPredicate", f"predicate {atom.predicate}", where))
            return
        if signature.arity != len(atom.args):
            diagnostics.append(
                Diagnostic("ArityMismatch", f"{atom} needs {signature.arity} arguments", where)
            )
            return
        for arg, param in zip(atom.args, signature.parameters):
            if arg not in guaranteed:
                diagnostics.append(Diagnostic("UnknownObject", f"object {arg} in {atom}", where))
            elif not domain.is_subtype(guaranteed[arg], param.type):
                diagnostics.append(
                    Diagnostic("TypeMismatch", f"{arg} in {atom} is not a {param.type}", where)
                )

    for section, invariants in (("init", config.init_invariants), ("goal", config.goal_invariants)):
        for k, text in enumerate(invariants):
            where = f"{section}_invariants/{k}"
            try:
                atom, _ = parse_invariant(text, negated_allowed=section == "goal")
            except PddlError as e:
                diagnostics.append(Diagnostic("SchemaError", str(e), where))
                continue
            if section == "init" and atom.is_equality:
                diagnostics.append(Diagnostic("SchemaError", "equality in init", where))
                continue
            check_atom(atom, where)

    # groups and predicate pools
    names: set[str] = set()
    tag_types: dict[str, str] = {}
    tag_max: dict[str, int] = {}
    all_emitted = {e.tag for _, _, m in config.sampling_order() for e in m.emits}
    edges: dict[str, set[str]] = {}

    for group in config.init_groups + config.goal_groups:
        where = f"groups/{group.name}"
        if group.name in names:
            diagnostics.append(Diagnostic("DuplicateName", f"group {group.name}", where))
        names.add(group.name)
        if group.mode == "exclusive-choice":
            weights = group.weights
            if len(group.members) < 2:
                diagnostics.append(
                    Diagnostic("InvalidWeights", "exclusive-choice needs at least two members", where)
                )
            if len(weights) != len(group.members) or any(
                not (w > 0 and w != float("inf")) for w in weights
            ):
                diagnostics.append(
                    Diagnostic("InvalidWeights", "one positive finite weight per member", where)
                )

    for section, group, member in config.sampling_order():
        where = f"{section}_groups/{group.name}/{member.name}"
        if member.name in names:
            diagnostics.append(Diagnostic("DuplicateName", f"predicate pool {member.name}", where))
        names.add(member.name)

        signature = domain.get_predicate(member.predicate)
        if signature is None:
            diagnostics.append(Diagnostic("UnknownPredicate", f"predicate {member.predicate}", where))
            continue
        if signature.arity != len(member.args):
            diagnostics.append(
                Diagnostic(
                    "ArityMismatch",
                    f"{member.predicate} takes {signature.arity} arguments, {len(member.args)} given",
                    where,
                )
            )
            continue
        if member.negated and section == "init":
            diagnostics.append(Diagnostic("SchemaError", "negated atoms are not allowed in init", where))

        if isinstance(member.count, tuple) and member.count[0] > member.count[1]:
            diagnostics.append(Diagnostic("SchemaError", f"invalid count range {member.count}", where))
        if isinstance(member.count, str):
            kind, ref = member.count.split(":", 1)
            if kind == "each" and config.pool(ref) is None:
                diagnostics.append(Diagnostic("UnknownPool", f"count refers to pool {ref}", where))
            if kind == "each-tag" and ref not in all_emitted:
                diagnostics.append(Diagnostic("TagUndefined", f"tag {ref}", where))

        arg_types: list[Optional[str]] = []
        for position, (source, param) in enumerate(zip(member.args, signature.parameters)):
            actual = None
            if source.kind == "pool":
                pool = config.pool(source.ref)
                if pool is None:
                    diagnostics.append(Diagnostic("UnknownPool", f"pool {source.ref}", where))
                else:
                    actual = pool.type
            elif source.kind == "object":
                if source.ref not in guaranteed:
                    diagnostics.append(Diagnostic("UnknownObject", f"object {source.ref}", where))
                else:
                    actual = guaranteed[source.ref]
            else:
                if source.ref not in all_emitted:
                    diagnostics.append(Diagnostic("TagUndefined", f"tag {source.ref}", where))
                elif source.ref not in tag_types:
                    diagnostics.append(
                        Diagnostic("TagOrder", f"tag {source.ref} is consumed before it is emitted", where)
                    )
                else:
                    actual = tag_types[source.ref]
            if actual is not None and actual in domain.type_names and not domain.is_subtype(actual, param.type):
                diagnostics.append(
                    Diagnostic(
                        "TypeMismatch",
                        f"argument {position} of {member.predicate} expects {param.type}, source gives {actual}",
                        where,
                    )
                )
            arg_types.append(actual)

        count_max = _max_count(member.count, config, tag_max)

        # Exclusive draws must be covered by the smallest pool instance
        draws: dict[str, int] = {}
        for source in member.args:
            pool = config.pool(source.ref) if source.kind == "pool" else None
            if pool is not None and (source.selection or pool.selection) == "exclusive":
                draws[source.ref] = draws.get(source.ref, 0) + 1
        for pool_name, positions in draws.items():
            pool = config.pool(pool_name)
            if pool.min_count < count_max * positions:
                diagnostics.append(
                    Diagnostic(
                        "PoolExhaustible",
                        f"exclusive pool {pool_name} may hold {pool.min_count} objects, "
                        f"{member.name} draws up to {count_max * positions}",
                        where,
                    )
                )

        for emit in member.emits:
            if emit.position >= len(member.args):
                diagnostics.append(
                    Diagnostic("ArityMismatch", f"tag {emit.tag} position {emit.position} out of range", where)
                )
                continue
            if arg_types[emit.position] is not None and emit.tag not in tag_types:
                tag_types[emit.tag] = arg_types[emit.position]
            tag_max[emit.tag] = tag_max.get(emit.tag, 0) + count_max
            for consumed, _ in member.consumes:
                edges.setdefault(consumed, set()).add(emit.tag)

    cycle = _find_cycle(edges)
    if cycle:
        diagnostics.append(Diagnostic("TagCycle", " -> ".join(cycle)))
    return diagnostics


def _find_cycle(edges: dict[str, set[str]]) -> list[str]:
    """Return one cycle in the tag dataflow graph as a node path, or an empty list."""
    state: dict[str, int] = {}
    path: list[str] = []

    def visit(node: str) -> list[str]:
        state[node] = 1
        path.append(node)
        for nxt in sorted(edges.get(node, ())):
            if state.get(nxt) == 1:
                return path[path.index(nxt):] + [nxt]
            if nxt not in state:
                found = visit(nxt)
                if found:
                    return found
        state[node] = 2
        path.pop()
        return []

    for node in sorted(edges):
        if node not in state:
            found = visit(node)
            if found:
                return found
    return []
