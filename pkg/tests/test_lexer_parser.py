"""Tests for the PDDL lexer and the domain/problem/plan parsers."""

import pytest

from planning.errors import (
    BindingError,
    DomainMismatch,
    LexError,
    NonMonotonicTimestamps,
    PlanFormatError,
    StructureError,
    UnsupportedFeature,
)
from planning.lexer import SList, read_sexprs, tokenize
from planning.model import Atom, Literal
from planning.parser import parse_domain, parse_plan, parse_problem


class TestLexer:
    """Tests for tokenize and read_sexprs."""

    def test_symbols_are_lowercased(self):
        """Identifiers are case-insensitive."""
        tokens = list(tokenize("(Define (DOMAIN Ferry))"))
        assert [t.value for t in tokens if t.kind == "symbol"] == ["define", "domain", "ferry"]

    def test_comments_are_dropped(self):
        """A ; comment runs to end of line."""
        tokens = list(tokenize("(a ; ignored )\n b)"))
        assert [t.value for t in tokens] == ["(", "a", "b", ")"]

    def test_positions_are_one_based(self):
        """Tokens carry line and column."""
        tokens = list(tokenize("(a\n  b)"))
        b = tokens[2]
        assert (b.line, b.column) == (2, 3)

    def test_illegal_character(self):
        """Characters outside the PDDL alphabet raise LexError."""
        with pytest.raises(LexError) as info:
            list(tokenize("(a $b)"))
        assert info.value.line == 1
        assert info.value.column == 4

    def test_unbalanced_close(self):
        with pytest.raises(LexError):
            read_sexprs("(a))")

    def test_unclosed_open(self):
        with pytest.raises(LexError):
            read_sexprs("((a)")

    def test_nested_lists(self):
        """read_sexprs builds nested SList nodes."""
        (root,) = read_sexprs("(a (b c) d)")
        assert isinstance(root, SList)
        assert isinstance(root[1], SList)
        assert repr(root) == "(a (b c) d)"

    def test_bytes_must_be_utf8(self):
        with pytest.raises(LexError):
            read_sexprs(b"(a \xff)")


class TestParseDomain:
    """Tests for parse_domain."""

    def test_ferry_structure(self, ferry_domain):
        """The ferry fixture parses with its types, predicates and actions."""
        assert ferry_domain.name == "ferry"
        assert {name for name, _ in ferry_domain.types} == {"car", "location"}
        assert [a.name for a in ferry_domain.actions] == ["board", "sail", "debark"]
        assert ferry_domain.get_predicate("empty").arity == 0

    def test_equality_precondition_kept(self, ferry_domain):
        """(not (= ?from ?to)) stays a negated equality literal."""
        sail = ferry_domain.get_action("sail")
        assert Literal(Atom("=", ("?from", "?to")), negated=True) in sail.precondition

    def test_effects_split_into_add_and_delete(self, ferry_domain):
        board = ferry_domain.get_action("board")
        assert Atom("on-ferry", ("?c",)) in board.add_effects
        assert Atom("empty") in board.delete_effects

    def test_action_costs(self, travel_domain):
        """increase of total-cost by a static function term is recorded."""
        drive = travel_domain.get_action("drive")
        assert drive.cost is not None
        assert drive.cost.amount == Atom("distance", ("?from", "?to"))
        assert travel_domain.has_action_costs

    def test_unsupported_requirement(self):
        text = "(define (domain d) (:requirements :strips :durative-actions))"
        with pytest.raises(UnsupportedFeature):
            parse_domain(text)

    def test_unknown_requirement(self):
        text = "(define (domain d) (:requirements :made-up))"
        with pytest.raises(StructureError):
            parse_domain(text)

    def test_disjunction_rejected(self):
        """or-conditions are outside the supported fragment."""
        text = """(define (domain d) (:predicates (p) (q))
          (:action a :parameters () :precondition (or (p) (q)) :effect (p)))"""
        with pytest.raises(UnsupportedFeature):
            parse_domain(text)

    def test_undeclared_predicate(self):
        text = """(define (domain d) (:predicates (p))
          (:action a :parameters () :precondition (q) :effect (p)))"""
        with pytest.raises(BindingError):
            parse_domain(text)

    def test_unbound_variable(self):
        text = """(define (domain d) (:predicates (p ?x))
          (:action a :parameters () :precondition (p ?y) :effect (p ?y)))"""
        with pytest.raises(BindingError):
            parse_domain(text)

    def test_two_define_forms(self):
        with pytest.raises(StructureError):
            parse_domain("(define (domain a)) (define (domain b))")


class TestParseProblem:
    """Tests for parse_problem."""

    def test_ferry_problem(self, ferry_problem):
        assert ferry_problem.object_names == ["c1", "l1", "l2"]
        assert Atom("empty") in ferry_problem.init
        assert ferry_problem.goal == (Literal(Atom("at", ("c1", "l2"))),)

    def test_function_values_and_metric(self, travel_problem):
        values = dict(travel_problem.function_values)
        assert values[Atom("distance", ("a", "b"))] == 2
        assert values[Atom("total-cost")] == 0
        assert travel_problem.metric == ("minimize", Atom("total-cost"))

    def test_duplicate_init_atoms_merged(self, ferry_domain):
        text = """(define (problem p) (:domain ferry) (:objects c1 - car l1 - location)
          (:init (empty) (empty) (at c1 l1)) (:goal (and (empty))))"""
        problem = parse_problem(text, ferry_domain)
        assert problem.init.count(Atom("empty")) == 1

    def test_negative_init_rejected(self, ferry_domain):
        text = """(define (problem p) (:domain ferry) (:objects l1 - location)
          (:init (not (empty))) (:goal (and (empty))))"""
        with pytest.raises(StructureError):
            parse_problem(text, ferry_domain)

    def test_object_type_mismatch(self, ferry_domain):
        """A location where a car is expected fails binding."""
        text = """(define (problem p) (:domain ferry) (:objects l1 l2 - location)
          (:init (at l1 l2)) (:goal (and (empty))))"""
        with pytest.raises(BindingError):
            parse_problem(text, ferry_domain)

    def test_domain_name_mismatch_strict(self, ferry_domain):
        text = """(define (problem p) (:domain other) (:objects l1 - location)
          (:init (empty)) (:goal (and (empty))))"""
        with pytest.raises(DomainMismatch):
            parse_problem(text, ferry_domain, strict_domain_name=True)

    def test_domain_name_mismatch_lenient(self, ferry_domain):
        """Without strict mode the mismatch only warns."""
        text = """(define (problem p) (:domain other) (:objects l1 - location)
          (:init (empty)) (:goal (and (empty))))"""
        problem = parse_problem(text, ferry_domain)
        assert problem.domain_name == "other"


class TestParsePlan:
    """Tests for parse_plan."""

    def test_valid_plan(self, ferry_plans):
        plan = parse_plan(ferry_plans["valid"])
        assert plan.terminated
        assert plan.actions == [
            ("board", ("c1", "l1")),
            ("sail", ("l1", "l2")),
            ("debark", ("c1", "l2")),
        ]

    def test_blank_lines_and_comments(self):
        plan = parse_plan("; header\n\n1: (board c1 l1) ; go\n\n")
        assert len(plan) == 1
        assert not plan.terminated

    def test_malformed_line_reports_line(self, ferry_plans):
        with pytest.raises(PlanFormatError) as info:
            parse_plan(ferry_plans["malformed"])
        assert info.value.line == 1

    def test_non_monotonic_timestamps(self):
        with pytest.raises(NonMonotonicTimestamps):
            parse_plan("2: (a)\n1: (b)")

    def test_content_after_end(self):
        with pytest.raises(PlanFormatError):
            parse_plan("1: (a)\nEND\n2: (b)")

    def test_empty_action(self):
        with pytest.raises(PlanFormatError):
            parse_plan("1: ()")

    def test_empty_text_is_empty_plan(self):
        plan = parse_plan("")
        assert len(plan) == 0
