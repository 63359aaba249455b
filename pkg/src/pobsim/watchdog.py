"""Decentralized misbehavior review.

Suspicious behaviors are judged by committees sampled from the other
validators. A verdict is guilty when the malicious-vote fraction reaches
the threshold theta (compared as an exact rational, so a 2/3 bar cannot
be flipped by float rounding). Guilty verdicts slash the subject's weight
through the `weights` operations, with escalation for repeat offenders.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .scoring import ActionKind, BehaviorRecord, outcome_utility
from .weights import WeightTable, apply_additive_slash, apply_multiplicative_slash

# vote_fn(member_id, behavior, rng) -> True (malicious) / False / None.
# None means "no strategy override": fall back to the honest vote model.
VoteFn = Callable[[str, BehaviorRecord, random.Random], Optional[bool]]


@dataclass(frozen=True)
class SuspicionReport:
    """A validator flagging one behavior for committee review."""

    subject: str
    behavior: BehaviorRecord
    behavior_index: int
    epoch: int
    reporter: str

    def __post_init__(self):
        if self.subject != self.behavior.actor:
            raise ValueError("report subject must match the behavior's actor")


@dataclass(frozen=True)
class Penalty:
    """How a guilty subject is to be slashed."""

    kind: str  # "additive" | "multiplicative" | "full"
    value: float  # weight delta (additive) or retained fraction (multiplicative)


@dataclass(frozen=True)
class Verdict:
    subject: str
    epoch: int
    behavior_index: int
    malicious_fraction: float
    committee_size: int
    guilty: bool
    penalty_applied: float  # weight actually removed; 0 unless guilty
    penalty_kind: str = ""
    penalty_value: float = 0.0
    reporter_count: int = 1

    def __post_init__(self):
        if not self.guilty and self.penalty_applied != 0.0:
            raise ValueError("penalty_applied must be 0 for not-guilty verdicts")


@dataclass(frozen=True)
class PenaltyPolicy:
    """Penalty coefficient, escalation schedule and slash mode.

    `escalation[f]` is the multiplier applied at offense count f; counts
    beyond the table reuse its last entry. The schedule must start at 1
    and be non-decreasing.
    """

    base_coefficient: float = 1.0
    escalation: tuple[float, ...] = (1.0,)
    mode: str = "additive"
    rho_p: float = 0.2
    full_slash_kinds: frozenset[ActionKind] = frozenset({ActionKind.DOUBLE_SIGN})

    def __post_init__(self):
        if self.base_coefficient <= 0:
            raise ValueError("base_coefficient must be > 0")
        if self.mode not in ("additive", "multiplicative"):
            raise ValueError(f"unknown penalty mode {self.mode!r}")
        if not 0.0 <= self.rho_p < 1.0:
            raise ValueError(f"rho_p {self.rho_p} outside [0, 1)")
        if not self.escalation or self.escalation[0] != 1.0:
            raise ValueError("escalation schedule must start at 1.0")
        for a, b in zip(self.escalation, self.escalation[1:]):
            if b < a or a < 1.0:
                raise ValueError("escalation schedule must be non-decreasing and >= 1")

    def multiplier(self, offense_count: int) -> float:
        idx = min(offense_count, len(self.escalation) - 1)
        return self.escalation[idx]


def form_committee(
    validators: Iterable[str],
    subject: str,
    size: int,
    rng: random.Random,
) -> set[str]:
    """Uniform sample of `size` distinct validators, never the subject."""
    pool = sorted(v for v in validators if v != subject)
    if size < 0:
        raise ValueError("committee size must be >= 0")
    if size > len(pool):
        raise ValueError(f"committee size {size} exceeds eligible pool of {len(pool)}")
    return set(rng.sample(pool, size))


def committee_vote(
    member: str,
    behavior: BehaviorRecord,
    detection_accuracy: float,
    rng: random.Random,
) -> bool:
    """Honest vote model: spot harm with the given accuracy.

    A behavior is harmful when its outcome utility is negative. An honest
    member votes "malicious" with probability `detection_accuracy` on
    harmful behaviors and with probability 1 - accuracy otherwise.
    """
    if not 0.0 <= detection_accuracy <= 1.0:
        raise ValueError(f"detection_accuracy {detection_accuracy} outside [0, 1]")
    harmful = outcome_utility(behavior) < 0.0
    p_malicious = detection_accuracy if harmful else 1.0 - detection_accuracy
    return rng.random() < p_malicious


def decide(verdict_votes: Sequence[bool], theta: Fraction) -> tuple[bool, Fraction]:
    """Tally votes against theta using exact rational arithmetic."""
    if not verdict_votes:
        raise ValueError("vote list is empty")
    if not 0 < theta <= 1:
        raise ValueError(f"theta {theta} outside (0, 1]")
    phi_x = Fraction(sum(1 for v in verdict_votes if v), len(verdict_votes))
    return phi_x >= theta, phi_x


def compute_penalty(policy: PenaltyPolicy, behavior: BehaviorRecord, offense_count: int) -> Penalty:
    """Penalty for a behavior already found guilty.

    Additive mode removes p * escalation(f) * |base utility| of weight
    (magnitude: harmful behaviors carry negative base utility and the
    slash must shrink, not grow, the offender). Multiplicative mode keeps
    a rho_p ** escalation(f) fraction. Kinds in `full_slash_kinds` wipe
    the entire weight regardless of mode.
    """
    if offense_count < 0:
        raise ValueError("offense_count must be >= 0")
    if behavior.kind in policy.full_slash_kinds:
        return Penalty("full", 0.0)
    esc = policy.multiplier(offense_count)
    if policy.mode == "additive":
        return Penalty("additive", policy.base_coefficient * esc * abs(behavior.base_utility))
    return Penalty("multiplicative", policy.rho_p**esc)


def apply_penalty(table: WeightTable, target: str, penalty: Penalty) -> WeightTable:
    if penalty.kind == "additive":
        return apply_additive_slash(table, target, penalty.value)
    if penalty.kind == "multiplicative":
        return apply_multiplicative_slash(table, target, penalty.value)
    if penalty.kind == "full":
        return apply_multiplicative_slash(table, target, 0.0)
    raise ValueError(f"unknown penalty kind {penalty.kind!r}")


def process_epoch_suspicions(
    reports: Sequence[SuspicionReport],
    table: WeightTable,
    policy: PenaltyPolicy,
    theta: Fraction,
    committee_size: int,
    rng: random.Random,
    *,
    detection_accuracy: float = 1.0,
    vote_fn: Optional[VoteFn] = None,
    offense_counts: Optional[dict[str, int]] = None,
    eligible: Optional[Iterable[str]] = None,
) -> tuple[WeightTable, list[Verdict]]:
    """Convene one committee per distinct reported behavior and apply verdicts.

    Reports about the same behavior are merged into a single session (the
    reporter count is kept for the record). Sessions run in deterministic
    order: (epoch, subject, behavior index). Guilty verdicts slash the
    subject and bump its offense count in `offense_counts` (mutated in
    place when provided).
    """
    if offense_counts is None:
        offense_counts = {}
    pool = sorted(eligible) if eligible is not None else table.ids()

    sessions: dict[tuple[int, str, int], list[SuspicionReport]] = {}
    for r in reports:
        sessions.setdefault((r.epoch, r.subject, r.behavior_index), []).append(r)

    verdicts: list[Verdict] = []
    for key in sorted(sessions):
        epoch, subject, behavior_index = key
        group = sessions[key]
        behavior = group[0].behavior
        members = form_committee(pool, subject, committee_size, rng)
        votes: list[bool] = []
        for member in sorted(members):
            vote = vote_fn(member, behavior, rng) if vote_fn is not None else None
            if vote is None:
                vote = committee_vote(member, behavior, detection_accuracy, rng)
            votes.append(vote)
        guilty, phi_x = decide(votes, theta) if votes else (False, Fraction(0))
        removed = 0.0
        penalty_kind = ""
        penalty_value = 0.0
        if guilty:
            count = offense_counts.get(subject, 0)
            penalty = compute_penalty(policy, behavior, count)
            before = table.weight(subject)
            table = apply_penalty(table, subject, penalty)
            removed = before - table.weight(subject)
            offense_counts[subject] = count + 1
            penalty_kind = penalty.kind
            penalty_value = penalty.value
        verdicts.append(
            Verdict(
                subject=subject,
                epoch=epoch,
                behavior_index=behavior_index,
                malicious_fraction=float(phi_x),
                committee_size=len(votes),
                guilty=guilty,
                penalty_applied=removed,
                penalty_kind=penalty_kind,
                penalty_value=penalty_value,
                reporter_count=len(group),
            )
        )
    return table, verdicts
