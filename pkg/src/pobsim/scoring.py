"""Layered behavior scoring.

Each action a validator takes is scored as the sum of a motivation part
(weighted intensities over motivation types) and an outcome part
(base utility shaped by context and initiative). Per-epoch cumulative
scores drive the weight update; the activeness blend tracks how engaged
a validator is beyond raw utility.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

WEIGHT_SUM_TOL = 1e-9


class ActionKind(str, Enum):
    PROPOSE = "propose-block"
    VALIDATE = "validate-block"
    ORACLE = "oracle-report"
    FRAUD = "fraud-attempt"
    IDLE = "idle"
    DOUBLE_SIGN = "double-sign"


# Kinds that count toward the diversity index: the constructive roles a
# validator can play. Misbehavior kinds do not make a node "diverse".
CONSTRUCTIVE_KINDS = (ActionKind.PROPOSE, ActionKind.VALIDATE, ActionKind.ORACLE)


@dataclass(frozen=True)
class MotivationProfile:
    """Motivation intensities and their designer-chosen importance weights."""

    intensities: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "intensities", tuple(float(x) for x in self.intensities))
        object.__setattr__(self, "weights", tuple(float(x) for x in self.weights))
        if len(self.intensities) == 0:
            raise ValueError("motivation profile needs at least one type")
        if len(self.intensities) != len(self.weights):
            raise ValueError(
                f"intensities ({len(self.intensities)}) and weights "
                f"({len(self.weights)}) must have the same length"
            )
        for w in self.weights:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"motivation weight {w} outside [0, 1]")
        total = sum(self.weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"motivation weights sum to {total}, expected 1")


@dataclass(frozen=True, slots=True)
class BehaviorRecord:
    """One action by one validator in one epoch.

    `is_fraud_ground_truth` is a metrics-only label: nothing in scoring,
    weights, watchdog or rewards may branch on it.
    """

    actor: str
    epoch: int
    kind: ActionKind
    base_utility: float
    context_factor: float
    initiative: float
    motivation: MotivationProfile
    is_fraud_ground_truth: bool = False

    def __post_init__(self):
        if not 0.0 <= self.context_factor <= 1.0:
            raise ValueError(f"context_factor {self.context_factor} outside [0, 1]")
        if not 0.0 <= self.initiative <= 1.0:
            raise ValueError(f"initiative {self.initiative} outside [0, 1]")
        if self.epoch < 0:
            raise ValueError("epoch must be >= 0")


@dataclass(frozen=True)
class ActivenessInputs:
    """Per-validator participation summary over one scoring window."""

    action_count: int
    network_mean_actions: float
    mean_initiative: float
    diversity: float
    betas: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        if abs(sum(self.betas) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"betas sum to {sum(self.betas)}, expected 1")
        for b in self.betas:
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"beta {b} outside [0, 1]")


def motivation_utility(m: MotivationProfile) -> float:
    """Weighted sum of motivation intensities."""
    return sum(i * w for i, w in zip(m.intensities, m.weights))


def outcome_utility(b: BehaviorRecord) -> float:
    """Base utility shaped by context and initiative; keeps the sign of the base."""
    return b.base_utility * b.context_factor * b.initiative


def total_utility(b: BehaviorRecord) -> float:
    return motivation_utility(b.motivation) + outcome_utility(b)


def epoch_score(behaviors: Iterable[BehaviorRecord], actor: str, epoch: int) -> float:
    """Cumulative utility of `actor` over the given epoch. Empty selection -> 0."""
    return sum(total_utility(b) for b in behaviors if b.actor == actor and b.epoch == epoch)


def epoch_scores(behaviors: Sequence[BehaviorRecord], actors: Iterable[str], epoch: int) -> dict[str, float]:
    """Scores for every listed actor (0 for actors with no records)."""
    out = {a: 0.0 for a in actors}
    for b in behaviors:
        if b.epoch == epoch and b.actor in out:
            out[b.actor] += total_utility(b)
    return out


def activeness(a: ActivenessInputs) -> float:
    """Blend of relative frequency, mean initiative and diversity."""
    if a.network_mean_actions <= 0:
        raise ValueError("network_mean_actions must be > 0")
    b1, b2, b3 = a.betas
    return b1 * (a.action_count / a.network_mean_actions) + b2 * a.mean_initiative + b3 * a.diversity


def flag_anomalous(a: ActivenessInputs, freq_threshold: float, quality_threshold: float) -> bool:
    """True when a node is hyperactive but low-quality (scripted-looking).

    Fires only if the action rate is far above the network mean while both
    initiative and diversity sit below the quality bar.
    """
    if freq_threshold <= 0 or quality_threshold <= 0:
        raise ValueError("thresholds must be > 0")
    if a.network_mean_actions <= 0:
        raise ValueError("network_mean_actions must be > 0")
    freq_ratio = a.action_count / a.network_mean_actions
    return (
        freq_ratio > freq_threshold
        and a.mean_initiative < quality_threshold
        and a.diversity < quality_threshold
    )


def diversity_index(kinds: Iterable[ActionKind]) -> float:
    """Distinct constructive roles performed / number of constructive roles."""
    seen = {k for k in kinds if k in CONSTRUCTIVE_KINDS}
    return len(seen) / len(CONSTRUCTIVE_KINDS)


def activeness_inputs_for(
    behaviors: Sequence[BehaviorRecord],
    actor: str,
    network_mean_actions: float,
    betas: tuple[float, float, float],
) -> ActivenessInputs:
    """Assemble the activeness inputs of one actor from its epoch records."""
    mine = [b for b in behaviors if b.actor == actor]
    if mine:
        mean_init = sum(b.initiative for b in mine) / len(mine)
    else:
        mean_init = 0.0
    return ActivenessInputs(
        action_count=len(mine),
        network_mean_actions=network_mean_actions,
        mean_initiative=mean_init,
        diversity=diversity_index(b.kind for b in mine),
        betas=betas,
    )
