"""Epoch reward distribution.

Every active validator (epoch score above the activity threshold) gets a
fixed base stipend; the remainder of the pool is shared in proportion to
weight. An optional activeness multiplier (1 + epsilon * A_i) tops up the
most engaged nodes; at epsilon = 0 the pool is conserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import RewardPoolError
from .weights import WeightTable


@dataclass(frozen=True)
class RewardSchedule:
    total_reward: float
    base_reward: float
    activity_threshold: float = 0.0
    activeness_epsilon: float = 0.0

    def __post_init__(self):
        if self.total_reward < 0:
            raise ValueError("total_reward must be >= 0")
        if self.base_reward < 0:
            raise ValueError("base_reward must be >= 0")
        if self.activeness_epsilon < 0:
            raise ValueError("activeness_epsilon must be >= 0")


@dataclass(frozen=True)
class Payout:
    validator: str
    base: float
    bonus: float
    activeness_multiplier: float
    total: float


def active_set(epoch_scores: Mapping[str, float], beta: float) -> set[str]:
    """Validators whose epoch score strictly exceeds the threshold."""
    return {v for v, score in epoch_scores.items() if score > beta}


def distribute(
    schedule: RewardSchedule,
    table: WeightTable,
    epoch_scores: Mapping[str, float],
    activeness: Mapping[str, float] | None = None,
) -> list[Payout]:
    """Split the epoch pool over the active set.

    Each active validator receives base + bonus * (its weight share among
    actives), scaled by (1 + epsilon * A_i). Inactive validators receive
    nothing. If every active validator has zero weight the bonus is split
    uniformly. Raises RewardPoolError when the stipends alone exceed the
    pool.
    """
    actives = sorted(active_set(epoch_scores, schedule.activity_threshold))
    if not actives:
        return []
    stipend_total = schedule.base_reward * len(actives)
    if stipend_total > schedule.total_reward:
        raise RewardPoolError(
            f"base stipend {schedule.base_reward} x {len(actives)} active "
            f"validators exceeds pool {schedule.total_reward}"
        )
    bonus_pool = schedule.total_reward - stipend_total
    weight_total = sum(table.entries[v] for v in actives)
    payouts: list[Payout] = []
    for v in actives:
        if weight_total > 0.0:
            share = table.entries[v] / weight_total
        else:
            share = 1.0 / len(actives)
        bonus = bonus_pool * share
        a_i = activeness.get(v, 0.0) if activeness is not None else 0.0
        multiplier = 1.0 + schedule.activeness_epsilon * a_i
        payouts.append(
            Payout(
                validator=v,
                base=schedule.base_reward,
                bonus=bonus,
                activeness_multiplier=multiplier,
                total=(schedule.base_reward + bonus) * multiplier,
            )
        )
    return payouts
