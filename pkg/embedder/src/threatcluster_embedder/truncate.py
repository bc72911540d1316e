"""Token truncation strategies for the 512-token transformer input window.

Budgets are fixed: head keeps the first 510 content tokens, tail the last
510, head_tail the first 128 plus the last 382.  Two slots of the window are
reserved for the model's status tokens, so every budget sums to 510.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

WINDOW = 512
STATUS_TOKENS = 2

_BUDGETS = {
    "head": (510, 0),
    "tail": (0, 510),
    "head_tail": (128, 382),
}

KIND_BY_STRATEGY = {"head": "sbert_h", "tail": "sbert_t", "head_tail": "sbert_ht"}


@dataclass(frozen=True)
class TruncationStrategy:
    kind: str
    head_budget: int
    tail_budget: int

    def __post_init__(self) -> None:
        if self.kind not in _BUDGETS:
            raise ValueError(f"unknown truncation strategy {self.kind!r}")
        if (self.head_budget, self.tail_budget) != _BUDGETS[self.kind]:
            raise ValueError(f"budgets for {self.kind!r} must be {_BUDGETS[self.kind]}")
        if self.head_budget + self.tail_budget + STATUS_TOKENS > WINDOW:
            raise ValueError("budgets exceed the model input window")

    @property
    def total_budget(self) -> int:
        return self.head_budget + self.tail_budget

    @property
    def vector_kind(self) -> str:
        return KIND_BY_STRATEGY[self.kind]


def strategy(kind: str) -> TruncationStrategy:
    if kind not in _BUDGETS:
        raise ValueError(f"unknown truncation strategy {kind!r} (head | tail | head_tail)")
    head, tail = _BUDGETS[kind]
    return TruncationStrategy(kind=kind, head_budget=head, tail_budget=tail)


def truncate(token_ids: Sequence[int], strat: TruncationStrategy) -> list[int]:
    """Apply the strategy to a token id sequence.

    Sequences within budget pass through unchanged; longer ones keep the
    first head_budget ids and the last tail_budget ids.
    """
    ids = list(token_ids)
    if len(ids) <= strat.total_budget:
        return ids
    head = ids[: strat.head_budget] if strat.head_budget else []
    tail = ids[len(ids) - strat.tail_budget :] if strat.tail_budget else []
    return head + tail
