"""Tests for SFT record export."""

import json

from dataset.tuples import DatasetTuple
from training.prompts import COMPACT_INSTRUCTION, INSTRUCTION, build_prompt, export_sft, to_sft_record


def make_tuple(encoding="standard"):
    return DatasetTuple.create("ferry", "(define (domain ferry))\n", "(define (problem p))\n", "board c1 l1", encoding)


class TestToSftRecord:
    """Tests for to_sft_record."""

    def test_fields(self):
        item = make_tuple()
        record = to_sft_record(item)
        assert set(record) == {"id", "instruction", "input", "output"}
        assert record["id"] == item.id
        assert record["instruction"] == INSTRUCTION
        assert record["output"] == "board c1 l1"

    def test_compact_instruction(self):
        assert to_sft_record(make_tuple("compact"))["instruction"] == COMPACT_INSTRUCTION
        assert to_sft_record(make_tuple("anonymized+compact"))["instruction"] == COMPACT_INSTRUCTION

    def test_prompt_layout(self):
        prompt = build_prompt("(define (domain d))\n\n", "(define (problem p))")
        assert prompt == "Domain:\n(define (domain d))\n\nProblem:\n(define (problem p))\n"


class TestExportSft:
    """Tests for export_sft."""

    def test_writes_in_order(self, temp_dir):
        items = [make_tuple(), make_tuple("compact")]
        path = temp_dir / "sft.jsonl"
        assert export_sft(items, path) == 2
        records = [json.loads(line) for line in path.read_text().splitlines()]
        assert [r["id"] for r in records] == [t.id for t in items]

    def test_empty(self, temp_dir):
        assert export_sft([], temp_dir / "sft.jsonl") == 0
