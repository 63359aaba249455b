"""Block objects and the fork-choice rule.

Chains are compared by the *current* weight of the validators endorsing
each tip, not by accumulated utility: a fork signed only by keys that
have since lost their weight loses to the canonical chain no matter how
much utility it claims. Cumulative utility and proposer id only break
ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .scoring import BehaviorRecord, total_utility
from .weights import WeightTable


@dataclass(frozen=True)
class Block:
    height: int
    proposer: str
    behaviors: tuple[BehaviorRecord, ...]
    parent: Optional["Block"]
    timestamp_ms: float
    cumulative_utility: float
    signer_weight: float
    signers: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.parent is not None and self.height != self.parent.height + 1:
            raise ValueError(
                f"height {self.height} does not extend parent height {self.parent.height}"
            )


def genesis_block() -> Block:
    return Block(
        height=0,
        proposer="",
        behaviors=(),
        parent=None,
        timestamp_ms=0.0,
        cumulative_utility=0.0,
        signer_weight=0.0,
        signers=frozenset(),
    )


def extend_chain(
    parent: Block,
    proposer: str,
    behaviors: Sequence[BehaviorRecord],
    timestamp_ms: float,
    signers: Sequence[str],
    table: WeightTable,
) -> Block:
    """Append a block; cumulative utility and signer weight are derived."""
    utility = sum(total_utility(b) for b in behaviors)
    signer_weight = sum(table.entries.get(s, 0.0) for s in sorted(set(signers)))
    return Block(
        height=parent.height + 1,
        proposer=proposer,
        behaviors=tuple(behaviors),
        parent=parent,
        timestamp_ms=timestamp_ms,
        cumulative_utility=parent.cumulative_utility + utility,
        signer_weight=signer_weight,
        signers=frozenset(signers),
    )


def resign_tip(tip: Block, table: WeightTable) -> Block:
    """Re-evaluate a tip's endorsement weight against the current table."""
    signer_weight = sum(table.entries.get(s, 0.0) for s in sorted(tip.signers))
    return Block(
        height=tip.height,
        proposer=tip.proposer,
        behaviors=tip.behaviors,
        parent=tip.parent,
        timestamp_ms=tip.timestamp_ms,
        cumulative_utility=tip.cumulative_utility,
        signer_weight=signer_weight,
        signers=tip.signers,
    )


def fork_choice(tip_a: Block, tip_b: Block, table: WeightTable) -> Block:
    """Prefer the tip endorsed by more current weight.

    Ties fall back to cumulative utility, then to the lower proposer id,
    so the choice is total and deterministic.
    """
    a = resign_tip(tip_a, table)
    b = resign_tip(tip_b, table)
    if a.signer_weight != b.signer_weight:
        return tip_a if a.signer_weight > b.signer_weight else tip_b
    if a.cumulative_utility != b.cumulative_utility:
        return tip_a if a.cumulative_utility > b.cumulative_utility else tip_b
    return tip_a if a.proposer <= b.proposer else tip_b
