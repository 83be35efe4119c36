"""Deduplicate, shuffle and split dataset tuples, stratified by domain."""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from dataset.tuples import DatasetTuple
from utils.seeds import derive_seed

logger = logging.getLogger(__name__)

SPLIT_NAMES = ("train", "validation", "test")


class DegenerateSplit(ValueError):
    """A domain has fewer unique tuples than there are non-empty splits."""


@dataclass
class DatasetSplits:
    train: list[str] = field(default_factory=list)
    validation: list[str] = field(default_factory=list)
    test: list[str] = field(default_factory=list)
    ratios: tuple[float, float, float] = (0.8, 0.2, 0.0)
    seed: int = 0
    per_domain_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    duplicates: list[str] = field(default_factory=list)
    held_out_domains: tuple[str, ...] = ()

    def split(self, name: str) -> list[str]:
        if name not in SPLIT_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def all_ids(self) -> list[str]:
        return self.train + self.validation + self.test

    def counts(self) -> dict[str, int]:
        return {name: len(self.split(name)) for name in SPLIT_NAMES}


def parse_ratios(text: str) -> tuple[float, float, float]:
    """
    Parse ``"0.8,0.2"`` or ``"0.8,0.1,0.1"`` into (train, validation, test).

    Raises:
        ValueError: On negative values, more than three parts, or a sum other than 1
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not 2 <= len(parts) <= 3:
        raise ValueError(f"expected 2 or 3 ratios, got {text!r}")
    values = [float(p) for p in parts] + [0.0] * (3 - len(parts))
    return normalize_ratios(values)


def normalize_ratios(values: Sequence[float]) -> tuple[float, float, float]:
    values = list(values) + [0.0] * (3 - len(values))
    if len(values) != 3 or any(v < 0 for v in values):
        raise ValueError(f"invalid ratios {values}")
    if abs(sum(values) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(values)}")
    return (values[0], values[1], values[2])


def split_sizes(n: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of ``n`` items; ties favour earlier splits."""
    exact = [Fraction(r).limit_denominator(10**6) * n for r in ratios]
    sizes = [int(x) for x in exact]
    remainder = n - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in order[:remainder]:
        sizes[i] += 1
    return sizes


def deduplicate(tuples: Iterable[DatasetTuple]) -> tuple[list[DatasetTuple], list[str]]:
    """Keep the first occurrence of every id; return (unique, duplicate ids in input order)."""
    seen: set[str] = set()
    unique, duplicates = [], []
    for t in tuples:
        if t.id in seen:
            duplicates.append(t.id)
            continue
        seen.add(t.id)
        unique.append(t)
    return unique, duplicates


def assemble(
    tuples: Sequence[DatasetTuple],
    ratios: Sequence[float],
    seed: int,
    held_out_domains: Optional[Iterable[str]] = None,
) -> DatasetSplits:
    """
    Split tuples into train/validation/test.

    Args:
        tuples: Candidate tuples (duplicates allowed)
        ratios: Two or three proportions summing to 1
        seed: Shuffle seed
        held_out_domains: Domains whose tuples all go to the test split

    Returns:
        DatasetSplits; each domain is shuffled with its own derived seed and
        apportioned to the splits by largest remainder

    Raises:
        ValueError: Empty input or invalid ratios
        DegenerateSplit: A domain is too small for the requested splits
    """
    if not tuples:
        raise ValueError("cannot assemble an empty tuple list")
    ratios = normalize_ratios(ratios)
    held_out = tuple(sorted(set(held_out_domains or ())))

    unique, duplicates = deduplicate(tuples)
    if duplicates:
        logger.info("Discarded %d duplicate tuples", len(duplicates))

    by_domain: dict[str, list[str]] = {}
    for t in unique:
        by_domain.setdefault(t.domain_name, []).append(t.id)

    splits = DatasetSplits(
        ratios=ratios, seed=seed, duplicates=duplicates, held_out_domains=held_out
    )
    active = sum(1 for r in ratios if r > 0)

    for domain_name in sorted(by_domain):
        ids = by_domain[domain_name]
        random.Random(derive_seed(seed, domain_name)).shuffle(ids)
        if domain_name in held_out:
            sizes = [0, 0, len(ids)]
        else:
            if len(ids) < active:
                raise DegenerateSplit(
                    f"domain {domain_name} has {len(ids)} tuples for {active} splits"
                )
            sizes = split_sizes(len(ids), ratios)
        start = 0
        counts = {}
        for name, size in zip(SPLIT_NAMES, sizes):
            splits.split(name).extend(ids[start:start + size])
            counts[name] = size
            start += size
        splits.per_domain_counts[domain_name] = counts

    for name in SPLIT_NAMES:
        random.Random(derive_seed(seed, "order", name)).shuffle(splits.split(name))

    logger.info("Assembled splits %s from %d unique tuples", splits.counts(), len(unique))
    return splits
