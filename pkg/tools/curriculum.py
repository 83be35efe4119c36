"""Curriculum expansion: stacked copies with a linearly rising anonymisation probability."""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from utils.seeds import derive_seed

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CurriculumItem:
    index: int
    source_id: str
    anonymize: bool
    probability: Fraction


def schedule_probability(index: int, total: int) -> Fraction:
    """p(i) = (i - 1) / (N - 1) for 1-based ``index``; 0 when N = 1."""
    if total < 2:
        return Fraction(0)
    return Fraction(index - 1, total - 1)


def bernoulli_draw(seed: int, index: int, probability: Fraction) -> bool:
    """
    Counter-based draw for position ``index``.

    Each index gets its own generator, so a draw does not depend on how many
    other items were drawn before it.
    """
    rng = np.random.default_rng([seed & _SEED_MASK, index])
    return bool(rng.random() < float(probability))


def curriculum_expand(
    tuple_ids: Sequence[str],
    copies: int,
    seed: int,
    shuffle_copies: bool = False,
) -> list[CurriculumItem]:
    """
    Stack ``copies`` copies of ``tuple_ids`` and attach p(i) and a Bernoulli draw.

    Args:
        tuple_ids: Ordered source tuple ids (non-empty)
        copies: Number of stacked copies (at least 1)
        seed: Seed of the draw stream
        shuffle_copies: Shuffle each copy independently before stacking

    Returns:
        ``copies * len(tuple_ids)`` items in stacked order
    """
    if copies < 1:
        raise ValueError("copies must be at least 1")
    if not tuple_ids:
        raise ValueError("tuple_ids must not be empty")

    stacked: list[str] = []
    for copy in range(copies):
        block = list(tuple_ids)
        if shuffle_copies:
            random.Random(derive_seed(seed, "copy", copy)).shuffle(block)
        stacked.extend(block)

    total = len(stacked)
    items = []
    for index, source_id in enumerate(stacked, start=1):
        probability = schedule_probability(index, total)
        items.append(
            CurriculumItem(index, source_id, bernoulli_draw(seed, index, probability), probability)
        )
    return items
