"""Tests for the compact plan encoding."""

import pytest

from planning.parser import parse_plan
from tools.codec import DecodeFailure, decode_plan, encode_plan
from tests.randomized import random_case


class TestEncode:
    """Tests for encode_plan."""

    def test_drops_timestamps_and_end(self):
        plan = parse_plan("00100: (move truck1 depot1 depot2)\nEND")
        assert encode_plan(plan) == "move truck1 depot1 depot2"

    def test_matches_fixture(self, ferry_plans, fixtures_dir):
        expected = (fixtures_dir / "ferry" / "plan_valid.compact").read_text().strip()
        assert encode_plan(parse_plan(ferry_plans["valid"])) == expected

    def test_zero_arity_action(self):
        assert encode_plan(parse_plan("1: (noop)")) == "noop"


class TestDecode:
    """Tests for decode_plan."""

    def test_renumbers_from_one(self):
        assert decode_plan("move truck1 depot1 depot2") == "00001: (move truck1 depot1 depot2)\nEND"

    def test_same_actions_after_round_trip(self):
        """Timestamps are renumbered; the action sequence is preserved."""
        original = parse_plan("00100: (move truck1 depot1 depot2)\n00200: (load p1 truck1)\nEND")
        decoded = parse_plan(decode_plan(encode_plan(original)))
        assert decoded.actions == original.actions
        assert decoded.terminated

    def test_blank_lines_and_trailing_end(self):
        assert decode_plan("\nboard c1 l1\n\nsail l1 l2\nEND\n") == (
            "00001: (board c1 l1)\n00002: (sail l1 l2)\nEND"
        )

    def test_empty(self):
        assert decode_plan("") == "END"

    def test_illegal_token(self):
        with pytest.raises(DecodeFailure) as info:
            decode_plan("board c1 l1\nsail (l1) l2")
        assert info.value.line == 2


def plan_corpus(size):
    """Walked, arbitrary and mutated plans over random tasks, empty plans included."""
    return [random_case(seed)[2] for seed in range(size)]


class TestRoundTripCorpus:
    """Decoding an encoded plan restores its action sequence."""

    def test_corpus(self):
        corpus = plan_corpus(1_200)
        assert sum(1 for plan in corpus if not plan.steps) > 0
        for plan in corpus:
            compact = encode_plan(plan)
            decoded = parse_plan(decode_plan(compact))
            assert decoded.actions == plan.actions
            assert decoded.terminated
            assert [s.timestamp for s in decoded.steps] == list(range(1, len(plan) + 1))
            assert encode_plan(decoded) == compact
