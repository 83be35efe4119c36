"""Pluggable token counters and per-domain token statistics."""

import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import pandas as pd

from dataset.tuples import DatasetTuple

DEFAULT_LIMIT = 4096


class TokenCounter(Protocol):
    counter_id: str

    def __call__(self, text: str) -> int: ...


class WhitespaceCounter:
    counter_id = "whitespace"

    def __call__(self, text: str) -> int:
        return len(text.split())


class RegexCounter:
    """Words and parentheses as separate tokens; closer to subword tokenisers."""

    counter_id = "regex"
    _TOKEN_RE = re.compile(r"[()]|[^\s()]+")

    def __call__(self, text: str) -> int:
        return len(self._TOKEN_RE.findall(text))


COUNTERS: dict[str, Callable[[], TokenCounter]] = {
    WhitespaceCounter.counter_id: WhitespaceCounter,
    RegexCounter.counter_id: RegexCounter,
}


def get_counter(name: str) -> TokenCounter:
    try:
        return COUNTERS[name]()
    except KeyError:
        raise ValueError(f"unknown token counter {name!r}; choose from {sorted(COUNTERS)}") from None


@dataclass(frozen=True)
class DomainTokenStats:
    tuples: int
    count_over_limit: int
    longest: int


@dataclass
class TokenStats:
    limit: int
    counter_id: str
    per_domain: dict[str, DomainTokenStats] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "domain": name,
                "tuples": s.tuples,
                "over_limit": s.count_over_limit,
                "longest": s.longest,
            }
            for name, s in sorted(self.per_domain.items())
        ]
        return pd.DataFrame(rows, columns=["domain", "tuples", "over_limit", "longest"])

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "counter": self.counter_id,
            "per_domain": {
                name: {"tuples": s.tuples, "over_limit": s.count_over_limit, "longest": s.longest}
                for name, s in sorted(self.per_domain.items())
            },
        }


def tuple_lengths(tuples: Sequence[DatasetTuple], counter: TokenCounter) -> pd.DataFrame:
    """One row per tuple: domain and total token count of domain + problem + plan."""
    return pd.DataFrame(
        {
            "domain": [t.domain_name for t in tuples],
            "tokens": [
                counter(t.domain_text) + counter(t.problem_text) + counter(t.plan_text)
                for t in tuples
            ],
        },
        columns=["domain", "tokens"],
    )


def token_stats(
    tuples: Sequence[DatasetTuple],
    limit: int = DEFAULT_LIMIT,
    counter: Optional[TokenCounter] = None,
) -> TokenStats:
    """
    Count, per domain, tuples longer than ``limit`` tokens and the longest tuple.

    Args:
        tuples: Dataset tuples
        limit: Maximum token count allowed per tuple
        counter: Token counter (whitespace split when omitted)
    """
    if limit <= 0:
        raise ValueError("limit must be positive")
    counter = counter or WhitespaceCounter()
    stats = TokenStats(limit=limit, counter_id=counter.counter_id)
    if not tuples:
        return stats

    frame = tuple_lengths(tuples, counter)
    frame["over"] = frame["tokens"] > limit
    grouped = frame.groupby("domain", sort=True).agg(
        tuples=("tokens", "size"), over=("over", "sum"), longest=("tokens", "max")
    )
    for domain_name, row in grouped.iterrows():
        stats.per_domain[str(domain_name)] = DomainTokenStats(
            tuples=int(row["tuples"]),
            count_over_limit=int(row["over"]),
            longest=int(row["longest"]),
        )
    return stats
