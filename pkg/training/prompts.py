"""Supervised fine-tuning records built from dataset tuples."""

from pathlib import Path
from typing import Iterable, Union

from dataset.tuples import DatasetTuple
from utils.fileio import write_jsonl

INSTRUCTION = (
    "You are given a PDDL domain and a PDDL problem. "
    "Write a plan that solves the problem, one action per line."
)

COMPACT_INSTRUCTION = (
    "You are given a PDDL domain and a PDDL problem. "
    "Write a plan that solves the problem, one action per line as the action "
    "name followed by its arguments, without timestamps or parentheses."
)


def build_prompt(domain_text: str, problem_text: str) -> str:
    return f"Domain:\n{domain_text.rstrip()}\n\nProblem:\n{problem_text.rstrip()}\n"


def to_sft_record(item: DatasetTuple) -> dict[str, str]:
    """
    Convert a tuple to an instruction/input/output record.

    The instruction matches the tuple's plan encoding so compact plans are
    requested in compact form.
    """
    return {
        "id": item.id,
        "instruction": COMPACT_INSTRUCTION if item.encoding.compact else INSTRUCTION,
        "input": build_prompt(item.domain_text, item.problem_text),
        "output": item.plan_text,
    }


def export_sft(tuples: Iterable[DatasetTuple], path: Union[str, Path]) -> int:
    """Write one SFT record per tuple, preserving order. Returns the record count."""
    records = [to_sft_record(t) for t in tuples]
    write_jsonl(path, records)
    return len(records)
