"""Synthetic tuple corpora for assembly tests and benchmarks."""

import random
from typing import Sequence

from dataset.tuples import DatasetTuple, Encoding, Provenance
from utils.seeds import derive_seed

_DOMAIN_TEMPLATE = """(define (domain {name})
  (:requirements :strips :typing)
  (:types item - object)
  (:predicates (at ?x0 - item) (done ?x0 - item))
  (:action finish
    :parameters (?x0 - item)
    :precondition (and (at ?x0))
    :effect (and (done ?x0) (not (at ?x0)))))
"""


def _problem_text(domain: str, index: int, size: int) -> str:
    objects = " ".join(f"i{k}" for k in range(size))
    init = " ".join(f"(at i{k})" for k in range(size))
    goal = " ".join(f"(done i{k})" for k in range(size))
    return (
        f"(define (problem {domain}-p{index})\n"
        f"  (:domain {domain})\n"
        f"  (:objects {objects} - item)\n"
        f"  (:init {init})\n"
        f"  (:goal (and {goal})))\n"
    )


def _plan_text(size: int) -> str:
    lines = [f"{k + 1:05d}: (finish i{k})" for k in range(size)]
    return "\n".join(lines + ["END"])


def build_corpus(
    domains: Sequence[str],
    per_domain: int,
    duplicates: int = 0,
    seed: int = 0,
) -> list[DatasetTuple]:
    """
    Build ``per_domain`` distinct tuples for each domain plus planted duplicates.

    Args:
        domains: Domain names
        per_domain: Distinct tuples per domain
        duplicates: Byte-identical copies of randomly chosen tuples, inserted at random positions
        seed: Seed for the duplicate choices and positions

    Returns:
        ``len(domains) * per_domain + duplicates`` tuples
    """
    tuples: list[DatasetTuple] = []
    for name in domains:
        domain_text = _DOMAIN_TEMPLATE.format(name=name)
        for index in range(per_domain):
            size = 1 + index % 7
            tuples.append(
                DatasetTuple.create(
                    name,
                    domain_text,
                    _problem_text(name, index, size),
                    _plan_text(size),
                    Encoding.STANDARD,
                    Provenance("synthetic", index, "none"),
                )
            )
    if duplicates and not tuples:
        raise ValueError("cannot plant duplicates in an empty corpus")
    rng = random.Random(derive_seed(seed, "corpus"))
    for _ in range(duplicates):
        copy = tuples[rng.randrange(len(tuples))]
        tuples.insert(rng.randrange(len(tuples) + 1), copy)
    return tuples
