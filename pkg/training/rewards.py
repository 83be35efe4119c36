"""Verifier rewards and group-relative advantages for candidate plans."""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from planning.model import Domain, Problem
from tools.codec import DecodeFailure, decode_plan
from tools.validator import Outcome, PlanValidator, percentage

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-8

REWARDS: dict[Outcome, float] = {
    Outcome.VALID: 1.0,
    Outcome.EXECUTABLE_NO_GOAL: 0.1,
    Outcome.PRECONDITION_FAILURE: -0.1,
    Outcome.MALFORMED: 0.0,
}


def reward(outcome: Outcome) -> float:
    return REWARDS[Outcome(outcome)]


def group_advantages(rewards: Sequence[float], epsilon: float = DEFAULT_EPSILON) -> list[float]:
    """
    Normalise rewards within one rollout group.

    advantage_j = (r_j - mean) / (population std + epsilon). A group whose
    rewards are all equal gets exact zeros.

    Args:
        rewards: G >= 1 scalar rewards
        epsilon: Positive stabiliser added to the standard deviation

    Raises:
        ValueError: Empty group or non-positive epsilon
    """
    if len(rewards) == 0:
        raise ValueError("a rollout group needs at least one reward")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    values = np.asarray(rewards, dtype=np.float64)
    if np.all(values == values[0]):
        return [0.0] * len(values)
    centered = values - values.mean()
    return (centered / (values.std() + epsilon)).tolist()


@dataclass(frozen=True)
class RewardRecord:
    tuple_id: str
    candidate_index: int
    outcome: Outcome
    reward: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "tuple_id": self.tuple_id,
            "candidate": self.candidate_index,
            "outcome": self.outcome.value,
            "reward": self.reward,
        }


@dataclass
class RolloutGroup:
    tuple_id: str
    records: list[RewardRecord] = field(default_factory=list)
    advantages: list[float] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.records)

    @property
    def rewards(self) -> list[float]:
        return [r.reward for r in self.records]

    def summary(self) -> dict[str, Any]:
        """Outcome counts and the group's valid plan rate (percent, one decimal)."""
        counts = Counter(r.outcome for r in self.records)
        valid = counts.get(Outcome.VALID, 0)
        return {
            "size": self.size,
            "outcomes": {o.value: counts.get(o, 0) for o in Outcome},
            "valid_plan_rate": percentage(valid, self.size) if self.size else 0.0,
            "mean_reward": float(np.mean(self.rewards)) if self.records else 0.0,
        }

    def to_records(self) -> list[dict[str, Any]]:
        return [
            {**record.to_dict(), "advantage": advantage}
            for record, advantage in zip(self.records, self.advantages)
        ]


def score_candidates(
    domain: Domain,
    problem: Problem,
    candidates: Sequence[str],
    tuple_id: str = "",
    epsilon: float = DEFAULT_EPSILON,
) -> RolloutGroup:
    """
    Decode, validate and reward each compact candidate, then normalise the group.

    Candidate text never raises: undecodable text scores as Malformed.

    Args:
        domain: Parsed domain
        problem: Parsed problem
        candidates: Compact-encoded plans, as sampled from a model
        tuple_id: Identifier copied into every record
        epsilon: Advantage stabiliser

    Raises:
        InvalidInputs: When the domain/problem pair is inconsistent
    """
    validator = PlanValidator(domain, problem)
    records = []
    for index, candidate in enumerate(candidates):
        try:
            outcome = validator.validate(decode_plan(candidate)).outcome
        except DecodeFailure as e:
            logger.debug("Candidate %d not decodable: %s", index, e)
            outcome = Outcome.MALFORMED
        records.append(RewardRecord(tuple_id, index, outcome, reward(outcome)))
    group = RolloutGroup(tuple_id, records)
    if records:
        group.advantages = group_advantages(group.rewards, epsilon)
    return group


_BLANK_LINES = re.compile(r"\n[ \t]*\n")


def split_candidates(text: str) -> list[str]:
    """Split blank-line separated candidate blocks; surrounding blank lines are ignored."""
    text = text.replace("\r\n", "\n").strip("\n")
    if not text.strip():
        return []
    return [block.strip("\n") for block in _BLANK_LINES.split(text) if block.strip()]
