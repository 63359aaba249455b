"""Evaluation metrics over trial ledgers.

This is the only module allowed to read ground-truth fraud labels and
adversary roles: everything here is measurement, not protocol. Metrics
are computed per trial and then aggregated as mean with a normal-
approximation 95% confidence interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

from .config import ScenarioConfig
from .netsim import EpochLedger

CSV_COLUMNS = (
    "trial",
    "seed",
    "protocol",
    "far",
    "proposer_gini",
    "mean_latency_ms",
    "newcomer_adaptation_blocks",
    "suppression_blocks",
    "loss_averted",
    "bottom_decile_share",
    "false_positives",
)

Z_95 = 1.96


@dataclass
class TrialMetrics:
    far: Optional[float]
    proposer_gini: Optional[float]
    mean_latency_ms: float
    newcomer_adaptation_blocks: Optional[int]
    suppression_blocks: Optional[int]
    loss_averted: Optional[float]
    bottom_decile_share: Optional[float]
    false_positives: int = 0
    fraud_attempted: int = 0
    fraud_accepted: int = 0
    fraud_accepted_value: float = 0.0


@dataclass(frozen=True)
class FraudOutcome:
    epoch: int
    actor: str
    value: float
    accepted: bool


def fraud_acceptance_rate(attempted: int, accepted: int) -> Optional[float]:
    """Accepted / attempted; undefined (None) when nothing was attempted."""
    if attempted < 0 or accepted < 0:
        raise ValueError("counts must be non-negative")
    if accepted > attempted:
        raise ValueError(f"accepted ({accepted}) exceeds attempted ({attempted})")
    if attempted == 0:
        return None
    return accepted / attempted


def gini(counts: Sequence[float]) -> Optional[float]:
    """Gini coefficient of a non-negative count vector.

    0 for perfect equality, 1 - 1/n when one holder owns everything.
    Undefined (None) when the counts sum to zero.
    """
    if not counts:
        raise ValueError("counts must be non-empty")
    values = sorted(float(c) for c in counts)
    if values[0] < 0:
        raise ValueError("counts must be non-negative")
    n = len(values)
    total = sum(values)
    if total <= 0:
        return None
    weighted = sum((i + 1) * x for i, x in enumerate(values))
    return (2.0 * weighted - (n + 1) * total) / (n * total)


def adaptation_time(
    trajectory: Sequence[float],
    target_share: float,
    mode: str,
) -> Optional[int]:
    """First index at which the trajectory crosses the target.

    rise: first block with value >= target_share; fall: first block with
    value < target_share. None when the crossing never happens.
    """
    if mode not in ("rise", "fall"):
        raise ValueError(f"mode must be rise or fall, got {mode!r}")
    for i, value in enumerate(trajectory):
        if mode == "rise" and value >= target_share:
            return i
        if mode == "fall" and value < target_share:
            return i
    return None


def suppression_time(trajectory: Sequence[float], drop_frac: float = 0.1) -> Optional[int]:
    """First block where the value falls below drop_frac times its peak so far.

    Using the running peak pins the answer to the first genuine collapse;
    a later recovery (weights are forgiving by design) cannot retroactively
    move the suppression point.
    """
    peak = 0.0
    for i, value in enumerate(trajectory):
        if value > peak:
            peak = value
        elif peak > 0 and value < drop_frac * peak:
            return i
    return None


def false_positive_count(ledgers: Sequence[EpochLedger]) -> int:
    """Guilty verdicts whose underlying behavior was not actually fraud."""
    count = 0
    for ledger in ledgers:
        for v in ledger.verdicts:
            if v.guilty and not ledger.behaviors[v.behavior_index].is_fraud_ground_truth:
                count += 1
    return count


def fraud_outcomes(ledgers: Sequence[EpochLedger]) -> list[FraudOutcome]:
    """Acceptance of every ground-truth fraud attempt.

    A fraud is accepted iff its block confirmed, no committee found it
    guilty within the detection window, and (baseline) its actor had not
    already been slashed when the block was committed.
    """
    guilty_keys = {
        (v.epoch, v.subject, v.behavior_index)
        for ledger in ledgers
        for v in ledger.verdicts
        if v.guilty
    }
    outcomes: list[FraudOutcome] = []
    for ledger in ledgers:
        for idx, b in enumerate(ledger.behaviors):
            if not b.is_fraud_ground_truth:
                continue
            accepted = ledger.confirmed
            if (ledger.epoch, b.actor, idx) in guilty_keys:
                accepted = False
            if b.actor in ledger.neutralized:
                accepted = False
            outcomes.append(FraudOutcome(ledger.epoch, b.actor, abs(b.base_utility), accepted))
    return outcomes


def loss_averted(pob_ledgers: Sequence[EpochLedger], pos_ledgers: Sequence[EpochLedger]) -> float:
    """Accepted fraud value under the baseline minus under behavior weighting.

    Requires paired trials driven by common random numbers: both runs must
    contain the same fraud attempts.
    """
    pob = fraud_outcomes(pob_ledgers)
    pos = fraud_outcomes(pos_ledgers)
    if len(pob) != len(pos) or [
        (o.epoch, o.actor) for o in pob
    ] != [(o.epoch, o.actor) for o in pos]:
        raise ValueError("unpaired trials: fraud attempt streams differ")
    pos_value = sum(o.value for o in pos if o.accepted)
    pob_value = sum(o.value for o in pob if o.accepted)
    return pos_value - pob_value


def election_prob_trajectory(
    ledgers: Sequence[EpochLedger],
    vid: str,
    delta: float,
    protocol: str,
) -> list[float]:
    """Per-epoch probability of `vid` being elected proposer."""
    probs: list[float] = []
    for ledger in ledgers:
        w = ledger.weights_before
        if vid not in w:
            probs.append(0.0)
            continue
        total = sum(w.values())
        proportional = w[vid] / total if total > 0 else 0.0
        if protocol == "pob":
            probs.append(delta / len(w) + (1.0 - delta) * proportional)
        else:
            probs.append(proportional)
    return probs


def weight_share_trajectory(ledgers: Sequence[EpochLedger], ids: set[str]) -> list[float]:
    """Aggregate weight share of a group of validators, per epoch."""
    shares = []
    for ledger in ledgers:
        w = ledger.weights_before
        total = sum(w.values())
        group = sum(w.get(v, 0.0) for v in ids)
        shares.append(group / total if total > 0 else 0.0)
    return shares


def proposer_counts(ledgers: Sequence[EpochLedger]) -> dict[str, int]:
    ids: set[str] = set()
    for ledger in ledgers:
        ids.update(ledger.weights_before)
    counts = {v: 0 for v in ids}
    for ledger in ledgers:
        counts[ledger.proposer] = counts.get(ledger.proposer, 0) + 1
    return counts


def bottom_decile_share(ledgers: Sequence[EpochLedger]) -> Optional[float]:
    """Proposer share of the bottom tenth of validators by initial holding."""
    if not ledgers:
        return None
    initial = ledgers[0].weights_before
    counts = proposer_counts(ledgers)
    ranked = sorted(initial, key=lambda v: (initial[v], v))
    k = max(1, len(ranked) // 10)
    bottom = ranked[:k]
    total = sum(counts.values())
    if total == 0:
        return None
    return sum(counts.get(v, 0) for v in bottom) / total


def adversary_ids(config: ScenarioConfig) -> list[str]:
    ids = []
    for entry in config.roster:
        if entry.spec.kind != "honest":
            ids.extend(f"v{i:04d}" for i in range(entry.lo, entry.hi))
    return sorted(set(ids))


def compute_trial_metrics(
    ledgers: Sequence[EpochLedger],
    config: ScenarioConfig,
    protocol: str,
) -> TrialMetrics:
    outcomes = fraud_outcomes(ledgers)
    attempted = len(outcomes)
    accepted = sum(1 for o in outcomes if o.accepted)
    accepted_value = sum(o.value for o in outcomes if o.accepted)

    counts = proposer_counts(ledgers)
    gini_value = gini(list(counts.values())) if counts else None

    latencies = [l.confirm_ms for l in ledgers if l.confirmed and l.confirm_ms is not None]
    mean_latency = sum(latencies) / len(latencies) if latencies else 0.0

    newcomer_blocks: Optional[int] = None
    if config.newcomer_epoch is not None:
        join = config.newcomer_epoch
        traj = election_prob_trajectory(ledgers, "newcomer", config.delta, protocol)[join:]
        if traj:
            alive_at_join = len(ledgers[join].weights_before) if join < len(ledgers) else None
            if alive_at_join:
                target = config.adaptation_target_frac / alive_at_join
                newcomer_blocks = adaptation_time(traj, target, "rise")

    suppression: Optional[int] = None
    adversaries = adversary_ids(config)
    if adversaries:
        traj = election_prob_trajectory(ledgers, adversaries[0], config.delta, protocol)
        suppression = suppression_time(traj, config.suppression_drop_frac)

    return TrialMetrics(
        far=fraud_acceptance_rate(attempted, accepted),
        proposer_gini=gini_value,
        mean_latency_ms=mean_latency,
        newcomer_adaptation_blocks=newcomer_blocks,
        suppression_blocks=suppression,
        loss_averted=None,
        bottom_decile_share=bottom_decile_share(ledgers),
        false_positives=false_positive_count(ledgers),
        fraud_attempted=attempted,
        fraud_accepted=accepted,
        fraud_accepted_value=accepted_value,
    )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def aggregate_values(values: Sequence[Optional[float]]) -> dict:
    """Mean and 95% CI half-width, excluding undefined entries pairwise."""
    present = [float(v) for v in values if v is not None]
    n = len(present)
    if n == 0:
        return {"mean": None, "ci95": None, "n": 0}
    mean = sum(present) / n
    if n < 2:
        return {"mean": mean, "ci95": None, "n": n}
    var = sum((x - mean) ** 2 for x in present) / (n - 1)
    half_width = Z_95 * math.sqrt(var) / math.sqrt(n)
    return {"mean": mean, "ci95": half_width, "n": n}


def aggregate(per_trial: Sequence[TrialMetrics]) -> dict:
    """Aggregate every metric field across trials."""
    out: dict[str, dict] = {}
    for f in fields(TrialMetrics):
        values = [getattr(t, f.name) for t in per_trial]
        out[f.name] = aggregate_values(values)
    return out
