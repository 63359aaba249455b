"""Acceptance suite: one test per release criterion, at the stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Scenario runs are shared through module-scoped fixtures; the
whole suite is sized for a commodity multi-core machine (well under ten
minutes end to end).
"""

import csv
import itertools
import math
import random
import time
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import pytest

from pobsim.config import with_overrides
from pobsim.experiments import run_scenario, run_sweep
from pobsim.incentive import IncentiveParams, check_ic, empirical_ic, future_loss
from pobsim.metrics import weight_share_trajectory
from pobsim.netsim import parse_trace, run_trial
from pobsim.presets import builtin_presets, bundled_trace_path
from pobsim.scoring import (
    ActivenessInputs,
    BehaviorRecord,
    MotivationProfile,
    ActionKind,
    activeness,
    epoch_score,
    motivation_utility,
    outcome_utility,
    total_utility,
)
from pobsim.watchdog import decide
from pobsim.weights import WeightTable, select_proposer, update_weights

PRESETS = builtin_presets()

# chi-square upper critical values at significance 0.001
CHI2_CRIT = {1: 10.828, 2: 13.816, 3: 16.266, 4: 18.467}


def _report(criterion: int, message: str) -> None:
    print(f"ACCEPTANCE {criterion:02d} PASS: {message}")


def _read_rows(out_dir: Path, name: str = "trials.csv") -> list[dict]:
    with open(out_dir / name) as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# Shared scenario runs
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def case_a_stealth(tmp_path_factory):
    out = tmp_path_factory.mktemp("case-a-stealth")
    config = PRESETS["case-a-stealth"].build()
    start = time.monotonic()
    summary = run_scenario(config, out)
    elapsed = time.monotonic() - start
    return {"config": config, "summary": summary, "rows": _read_rows(out),
            "elapsed": elapsed, "out": out}


@pytest.fixture(scope="module")
def case_a_sybil(tmp_path_factory):
    out = tmp_path_factory.mktemp("case-a-sybil")
    config = PRESETS["case-a-sybil"].build()
    summary = run_scenario(config, out)
    return {"config": config, "summary": summary, "rows": _read_rows(out)}


@pytest.fixture(scope="module")
def case_b(tmp_path_factory):
    out = tmp_path_factory.mktemp("case-b")
    config = PRESETS["case-b-fairness-100"].build()
    summary = run_scenario(config, out)
    return {"config": config, "summary": summary, "rows": _read_rows(out)}


@pytest.fixture(scope="module")
def case_c(tmp_path_factory):
    out = tmp_path_factory.mktemp("case-c")
    config = PRESETS["case-c-replay"].build()
    trace = parse_trace(bundled_trace_path())
    summary = run_scenario(config, out, trace=trace)
    pob_ledgers = run_trial(config, config.seed, protocol="pob", trace=trace)
    return {"config": config, "summary": summary, "rows": _read_rows(out),
            "trace": trace, "pob_ledgers": pob_ledgers}


@pytest.fixture(scope="module")
def case_e(tmp_path_factory):
    out = tmp_path_factory.mktemp("case-e")
    config = PRESETS["case-e-sweep"].build()
    run_sweep(config, out)
    return {"config": config, "rows": _read_rows(out, "sweep.csv")}


# ---------------------------------------------------------------------------
# 1. Scoring algebra
# ---------------------------------------------------------------------------

class TestCriterion1ScoringAlgebra:
    def test_unit_examples_exact(self):
        assert motivation_utility(MotivationProfile((1.0, 0.0), (0.7, 0.3))) == 0.7
        assert motivation_utility(MotivationProfile((0.0,) * 3, (0.2, 0.3, 0.5))) == 0.0
        m = MotivationProfile((0.4, 0.9, 0.1), (0.5, 0.25, 0.25))
        assert math.isclose(motivation_utility(m), 0.45, abs_tol=1e-12)

        def rec(u_b, phi, alpha, motivation=MotivationProfile((0.0,), (1.0,))):
            return BehaviorRecord("a", 0, ActionKind.PROPOSE, u_b, phi, alpha, motivation)

        assert outcome_utility(rec(10.0, 0.5, 0.8)) == 4.0
        assert outcome_utility(rec(-100.0, 1.0, 1.0)) == -100.0
        assert outcome_utility(rec(3.0, 0.0, 0.9)) == 0.0
        assert math.isclose(
            total_utility(rec(10.0, 0.5, 0.8, MotivationProfile((1.0, 0.0), (0.7, 0.3)))),
            4.7, abs_tol=1e-12,
        )
        a = ActivenessInputs(20, 10.0, 0.2, 0.1, (0.4, 0.3, 0.3))
        assert math.isclose(activeness(a), 0.89, abs_tol=1e-12)
        assert activeness(ActivenessInputs(5, 10.0, 0.0, 0.0, (1.0, 0.0, 0.0))) == 0.5

    def test_randomized_invariants_ten_thousand_cases(self):
        rng = random.Random(1001)
        mot = MotivationProfile((0.3,), (1.0,))
        for _ in range(10_000):
            # additivity of epoch scores over concatenation
            n_a, n_b = rng.randrange(4), rng.randrange(4)
            part_a = [BehaviorRecord("x", 0, ActionKind.PROPOSE, rng.uniform(-5, 5),
                                     rng.random(), rng.random(), mot) for _ in range(n_a)]
            part_b = [BehaviorRecord("x", 0, ActionKind.VALIDATE, rng.uniform(-5, 5),
                                     rng.random(), rng.random(), mot) for _ in range(n_b)]
            whole = epoch_score(part_a + part_b, "x", 0)
            split = epoch_score(part_a, "x", 0) + epoch_score(part_b, "x", 0)
            assert math.isclose(whole, split, rel_tol=1e-9, abs_tol=1e-9)

            # linearity of the outcome part in the base utility
            u_b, phi, alpha, c = rng.uniform(-5, 5), rng.random(), rng.random(), rng.uniform(0.1, 4)
            base = outcome_utility(BehaviorRecord("x", 0, ActionKind.PROPOSE, u_b, phi, alpha, mot))
            scaled = outcome_utility(BehaviorRecord("x", 0, ActionKind.PROPOSE, c * u_b, phi, alpha, mot))
            assert math.isclose(scaled, c * base, rel_tol=1e-9, abs_tol=1e-9)

            # activeness monotone in each argument
            s_lo, s_hi = sorted((rng.randrange(30), rng.randrange(30)))
            a_lo, a_hi = sorted((rng.random(), rng.random()))
            d_lo, d_hi = sorted((rng.random(), rng.random()))
            betas = [rng.random() for _ in range(3)]
            total = sum(betas) or 1.0
            betas = tuple(b / total for b in betas)
            lo = activeness(ActivenessInputs(s_lo, 7.0, a_lo, d_lo, betas))
            hi = activeness(ActivenessInputs(s_hi, 7.0, a_hi, d_hi, betas))
            assert hi >= lo - 1e-12

            # permutation invariance of motivation utility
            j = rng.randrange(1, 6)
            intensities = [rng.uniform(0, 3) for _ in range(j)]
            weights = [rng.random() + 1e-6 for _ in range(j)]
            wt = sum(weights)
            weights = [w / wt for w in weights]
            order = list(range(j))
            rng.shuffle(order)
            before = motivation_utility(MotivationProfile(tuple(intensities), tuple(weights)))
            after = motivation_utility(MotivationProfile(
                tuple(intensities[i] for i in order), tuple(weights[i] for i in order)))
            assert math.isclose(before, after, rel_tol=1e-9, abs_tol=1e-12)
        _report(1, "scoring unit examples exact; 10^4-case invariants hold")


# ---------------------------------------------------------------------------
# 2. Weight update
# ---------------------------------------------------------------------------

class TestCriterion2WeightUpdate:
    def test_degenerate_cases_exact(self):
        table = WeightTable({"a": 0.3, "b": 0.7})
        assert update_weights(table, {"a": 9.0, "b": 1.0}, 0.0).entries == table.entries
        out = update_weights(WeightTable({"a": 0.5, "b": 0.5}), {"a": 3.0, "b": 1.0}, 1.0)
        assert out.entries == {"a": 0.75, "b": 0.25}

    def test_randomized_invariants_ten_thousand_tables(self):
        rng = random.Random(2002)
        for _ in range(10_000):
            n = rng.randrange(2, 9)
            ids = [f"v{i}" for i in range(n)]
            raw = [rng.random() + 1e-9 for _ in range(n)]
            total = sum(raw)
            table = WeightTable({v: w / total for v, w in zip(ids, raw)})
            scores = {v: rng.uniform(-3, 10) for v in ids}
            rho = rng.random()
            out = update_weights(table, scores, rho)
            assert math.isclose(out.total, 1.0, abs_tol=1e-9)
            assert all(w >= 0.0 for w in out.entries.values())
            # convex combination: each new weight between old weight and share
            clamped = {v: max(0.0, scores[v]) for v in ids}
            share_total = sum(clamped.values())
            for v in ids:
                share = clamped[v] / share_total if share_total > 0 else 1.0 / n
                lo, hi = sorted((table.entries[v], share))
                assert lo - 1e-12 <= out.entries[v] <= hi + 1e-12
        _report(2, "EMA update: unit-sum, non-negativity, convexity over 10^4 tables")


# ---------------------------------------------------------------------------
# 3. Leader election
# ---------------------------------------------------------------------------

class TestCriterion3LeaderElection:
    def test_delta_mixture_at_one_million_draws(self):
        table = WeightTable({"a": 0.9, "b": 0.1})
        rng = random.Random(33)
        n = 1_000_000
        hits = sum(select_proposer(table, ("a", "b"), 0.1, rng) == "a" for _ in range(n))
        expected = {"a": 0.86, "b": 0.14}
        freq_a = hits / n
        assert abs(freq_a - expected["a"]) < 0.01
        chi2 = sum(
            (obs - n * p) ** 2 / (n * p)
            for obs, p in ((hits, 0.86), (n - hits, 0.14))
        )
        assert chi2 < CHI2_CRIT[1]
        _report(3, f"delta-mixture frequency {freq_a:.4f} vs 0.86 (chi2={chi2:.2f})")

    def test_pure_baseline_uniform(self):
        ids = [f"v{i}" for i in range(5)]
        table = WeightTable({v: (0.9 if v == "v0" else 0.025) for v in ids})
        rng = random.Random(34)
        n = 100_000
        counts = defaultdict(int)
        for _ in range(n):
            counts[select_proposer(table, ids, 1.0, rng)] += 1
        chi2 = sum((counts[v] - n / 5) ** 2 / (n / 5) for v in ids)
        assert chi2 < CHI2_CRIT[4]


# ---------------------------------------------------------------------------
# 4. Watchdog
# ---------------------------------------------------------------------------

class TestCriterion4Watchdog:
    def test_perfect_detection_no_false_positives(self):
        config = with_overrides(
            PRESETS["case-a-stealth"].build(),
            protocol="pob", detection_accuracy=1.0, trials=2, epochs=120,
        )
        harmful_convicted = 0
        harmful_total = 0
        for trial in range(2):
            ledgers = run_trial(config, config.seed + trial, protocol="pob")
            for ledger in ledgers:
                guilty = {(v.subject, v.behavior_index) for v in ledger.verdicts if v.guilty}
                for idx, b in enumerate(ledger.behaviors):
                    if outcome_utility(b) < 0:
                        harmful_total += 1
                        assert (b.actor, idx) in guilty, "harmful behavior escaped"
                        harmful_convicted += 1
                for v in ledger.verdicts:
                    if v.guilty:
                        assert outcome_utility(ledger.behaviors[v.behavior_index]) < 0, \
                            "beneficial behavior convicted"
        assert harmful_total > 0
        _report(4, f"accuracy 1: {harmful_convicted}/{harmful_total} harmful convicted, 0 false positives")

    def test_framing_resistance_exhaustive_to_size_nine(self):
        theta = Fraction(2, 3)
        checked = 0
        for size in range(1, 10):
            for adversarial in range(size + 1):
                honest = size - adversarial
                if Fraction(honest, size) <= 1 - theta:
                    continue
                for positions in itertools.combinations(range(size), adversarial):
                    votes = [i in positions for i in range(size)]
                    guilty, _ = decide(votes, theta)
                    assert not guilty
                    checked += 1
        assert checked > 100


# ---------------------------------------------------------------------------
# 5. Determinism
# ---------------------------------------------------------------------------

class TestCriterion5Determinism:
    @pytest.mark.parametrize("preset,overrides", [
        ("case-a-stealth", {"trials": 2, "epochs": 60}),
        ("case-d-griefing", {"trials": 2}),
    ])
    def test_rerun_byte_identical(self, tmp_path, preset, overrides):
        config = with_overrides(PRESETS[preset].build(), **overrides)
        run_scenario(config, tmp_path / "first")
        run_scenario(config, tmp_path / "second")
        first = (tmp_path / "first/trials.csv").read_bytes()
        second = (tmp_path / "second/trials.csv").read_bytes()
        assert first == second
        _report(5, f"{preset}: re-run trials.csv byte-identical ({len(first)} bytes)")


# ---------------------------------------------------------------------------
# 6. Gini oracle
# ---------------------------------------------------------------------------

class TestCriterion6Gini:
    def test_brute_force_equivalence_all_small_vectors(self):
        from pobsim.metrics import gini

        checked = 0
        for n in range(1, 6):
            for counts in itertools.product(range(5), repeat=n):
                total = sum(counts)
                if total == 0:
                    assert gini(counts) is None
                    continue
                pairwise = sum(abs(x - y) for x in counts for y in counts)
                oracle = pairwise / (2 * n * total)
                assert gini(counts) == pytest.approx(oracle, abs=1e-12)
                checked += 1
        _report(6, f"gini matches pairwise oracle on {checked} vectors (len<=5, entries<=4)")


# ---------------------------------------------------------------------------
# 7. Incentive compatibility
# ---------------------------------------------------------------------------

class TestCriterion7Incentive:
    def test_future_loss_hand_examples(self):
        p = IncentiveParams(discount=0.9, immediate_penalty=10.0,
                            slash_factor=0.2, expected_honest_reward=3.0)
        assert future_loss(p) == pytest.approx(34.0)
        p2 = IncentiveParams(discount=0.5, immediate_penalty=0.0,
                             slash_factor=0.0, expected_honest_reward=1.0)
        assert future_loss(p2) == pytest.approx(2.0)
        holds, margin = check_ic(IncentiveParams(
            discount=0.9, immediate_penalty=10.0, slash_factor=0.2,
            expected_honest_reward=3.0, deviation_gain=5.0))
        assert holds and margin == pytest.approx(29.0)

    def test_empirical_direction_with_and_without_punishment(self):
        config = PRESETS["ic-check"].build()
        enforced = empirical_ic(config)
        assert enforced["deviation_unprofitable_all_trials"], enforced
        assert enforced["ic_holds_effective"]

        disabled = empirical_ic(with_overrides(config, detection_accuracy=0.0))
        assert disabled["ic_violation_observed"]
        assert not disabled["ic_holds_effective"]
        _report(7, (
            f"deviant {enforced['deviant_discounted_mean']:.2f} < honest "
            f"{enforced['honest_discounted_mean']:.2f} with punishment; "
            f"reversed ({disabled['deviant_discounted_mean']:.2f} vs "
            f"{disabled['honest_discounted_mean']:.2f}) without"
        ))


# ---------------------------------------------------------------------------
# 8-9. Case A fraud mitigation
# ---------------------------------------------------------------------------

class TestCriterion8StealthFraud:
    def test_far_separation(self, case_a_stealth):
        assert case_a_stealth["elapsed"] < 60.0
        far_pob = case_a_stealth["summary"]["protocols"]["pob"]["far"]["mean"]
        far_pos = case_a_stealth["summary"]["protocols"]["pos"]["far"]["mean"]
        assert far_pob < 0.25
        assert far_pos > 0.45
        by_trial = defaultdict(dict)
        for row in case_a_stealth["rows"]:
            by_trial[row["trial"]][row["protocol"]] = float(row["far"])
        for trial, fars in by_trial.items():
            assert fars["pob"] < fars["pos"], f"trial {trial}"
        _report(8, f"stealth FAR: {far_pob:.3f} (PoB) vs {far_pos:.3f} (PoS), "
                   f"gap holds in all {len(by_trial)} paired trials, "
                   f"{case_a_stealth['elapsed']:.1f}s")


class TestCriterion9SybilBurst:
    def test_far_gap_and_loss_averted(self, case_a_sybil):
        far_pob = case_a_sybil["summary"]["protocols"]["pob"]["far"]["mean"]
        far_pos = case_a_sybil["summary"]["protocols"]["pos"]["far"]["mean"]
        assert far_pob < far_pos - 0.3
        averted = [float(r["loss_averted"]) for r in case_a_sybil["rows"]
                   if r["protocol"] == "pob"]
        assert averted and all(v > 0 for v in averted)
        _report(9, f"sybil-burst FAR {far_pob:.3f} vs {far_pos:.3f}; "
                   f"loss averted positive in {len(averted)}/{len(averted)} trials")


# ---------------------------------------------------------------------------
# 10. Attacker suppression speed
# ---------------------------------------------------------------------------

class TestCriterion10Suppression:
    def test_weight_collapse_within_two_epochs_of_verdict(self, case_a_stealth):
        config = with_overrides(case_a_stealth["config"], protocol="pob")
        attacker = "v0099"
        for trial in range(config.trials):
            ledgers = run_trial(config, config.seed + trial, protocol="pob")
            first_guilty = next(
                (l.epoch for l in ledgers for v in l.verdicts
                 if v.guilty and v.subject == attacker), None)
            assert first_guilty is not None
            w_before = ledgers[first_guilty].weights_before[attacker]
            horizon = [
                ledgers[e].weights_before[attacker]
                for e in range(first_guilty + 1, min(first_guilty + 3, len(ledgers)))
            ]
            assert min(horizon) <= 0.2 * w_before, (trial, first_guilty)
        _report(10, "attacker weight falls >=80% within 2 epochs of first guilty verdict")

    def test_suppression_faster_than_baseline_every_trial(self, case_a_stealth):
        by_trial = defaultdict(dict)
        for row in case_a_stealth["rows"]:
            value = row["suppression_blocks"]
            by_trial[row["trial"]][row["protocol"]] = int(value) if value else None
        for trial, blocks in by_trial.items():
            pob, pos = blocks["pob"], blocks["pos"]
            assert pob is not None
            assert pos is None or pob < pos, f"trial {trial}: {pob} vs {pos}"
        pairs = {t: (b['pob'], b['pos']) for t, b in by_trial.items()}
        _report(10, f"suppression blocks (PoB, PoS) per trial: {pairs}")


# ---------------------------------------------------------------------------
# 11. Case B fairness
# ---------------------------------------------------------------------------

class TestCriterion11Fairness:
    def test_gini_bottom_decile_and_adaptation(self, case_b):
        protocols = case_b["summary"]["protocols"]
        gini_pob = protocols["pob"]["proposer_gini"]["mean"]
        gini_pos = protocols["pos"]["proposer_gini"]["mean"]
        bottom = protocols["pob"]["bottom_decile_share"]["mean"]
        adapt = protocols["pob"]["newcomer_adaptation_blocks"]["mean"]
        assert gini_pob < 0.2
        assert gini_pos > 0.4
        assert bottom >= 0.08
        assert adapt is not None and adapt <= 40
        _report(11, f"gini {gini_pob:.3f} vs {gini_pos:.3f}; bottom decile "
                    f"{bottom:.3f}; newcomer adapts in {adapt:.1f} blocks")


# ---------------------------------------------------------------------------
# 12. Case C trace replay
# ---------------------------------------------------------------------------

class TestCriterion12Replay:
    def test_culprit_slashed_next_epoch(self, case_c):
        trace = case_c["trace"]
        exploit_epoch = next(i for i, b in enumerate(trace) if b.is_exploit)
        culprit = trace[exploit_epoch].proposer
        ledgers = case_c["pob_ledgers"]
        w_before = ledgers[exploit_epoch].weights_before[culprit]
        w_after = ledgers[exploit_epoch + 1].weights_before[culprit]
        assert w_after <= 0.2 * w_before
        _report(12, f"culprit weight {w_before:.4f} -> {w_after:.6f} "
                    f"({(1 - w_after / w_before) * 100:.1f}% cut) next epoch")

    def test_zero_false_positives(self, case_c):
        for row in case_c["rows"]:
            if row["protocol"] == "pob":
                assert row["false_positives"] == "0"

    def test_latency_overhead_within_ten_percent(self, case_c):
        overhead = case_c["summary"]["paired"]["latency_overhead_frac"]
        assert overhead <= 0.10
        _report(12, f"verification latency overhead {overhead * 100:.2f}% <= 10%")


# ---------------------------------------------------------------------------
# 13. Case D adversary resilience
# ---------------------------------------------------------------------------

class TestCriterion13AdversaryResilience:
    def test_adaptive_sybil_share_capped(self):
        config = PRESETS["case-d-adaptive-sybil"].build()
        initial = {f"v{i:04d}" for i in range(95, 100)}
        worst = 0.0
        for trial in range(config.trials):
            ledgers = run_trial(config, config.seed + trial, protocol="pob")
            sybils = set(initial)
            for ledger in ledgers:
                for event in ledger.events:
                    if event.get("kind") == "join" and event.get("role") == "adaptive-sybil":
                        sybils.add(event["id"])
            shares = weight_share_trajectory(ledgers, sybils)
            worst = max(worst, max(shares))
            assert all(s <= 0.10 for s in shares)
        _report(13, f"adaptive Sybil aggregate weight share peaked at {worst:.4f} <= 0.10")

    def test_long_range_fork_rejected(self):
        config = PRESETS["case-d-long-range"].build()
        quorum = float(config.quorum)
        outcomes = []
        for trial in range(config.trials):
            ledgers = run_trial(config, config.seed + trial, protocol="pob")
            events = [e for l in ledgers for e in l.events if e.get("kind") == "fork-outcome"]
            assert len(events) == 1
            event = events[0]
            total = event["fork_signer_weight"] + event["main_signer_weight"]
            if event["fork_signer_weight"] < quorum * total:
                assert event["adopted"] is False
            outcomes.append(event["adopted"])
        assert not any(outcomes)
        _report(13, f"long-range fork rejected in {len(outcomes)}/{len(outcomes)} trials")

    def test_griefing_starves_without_verdicts(self):
        config = PRESETS["case-d-griefing"].build()
        griefer = "v0000"
        for trial in range(config.trials):
            ledgers = run_trial(config, config.seed + trial, protocol="pob")
            empties = sum(1 for l in ledgers[:10] if l.proposer == griefer)
            assert empties == 10  # forced schedule realizes the empty-block run
            w_start = ledgers[0].weights_before[griefer]
            w_end = ledgers[10].weights_before[griefer]
            assert w_end <= 0.4 * w_start  # >= 60% reduction
            assert all(not v.guilty for l in ledgers for v in l.verdicts)
        _report(13, "10 empty blocks cut griefer weight >=60% with zero guilty verdicts")


# ---------------------------------------------------------------------------
# 14. Case E parameter sweep
# ---------------------------------------------------------------------------

def _marginal(rows, param, metric):
    acc = defaultdict(list)
    for row in rows:
        if row["protocol"] != "pob" or row[metric] == "":
            continue
        acc[row[param]].append(float(row[metric]))
    return {k: sum(v) / len(v) for k, v in acc.items()}


class TestCriterion14Sweep:
    def test_far_non_increasing_in_penalty(self, case_e):
        far = _marginal(case_e["rows"], "penalty.base_coefficient", "far")
        assert far["1.5"] <= far["1.0"] + 1e-12
        _report(14, f"FAR by penalty coefficient: {far}")

    def test_theta_tradeoff(self, case_e):
        fp = _marginal(case_e["rows"], "theta", "false_positives")
        sup = _marginal(case_e["rows"], "theta", "suppression_blocks")
        order = ["1/2", "7/10", "9/10"]
        for lo, hi in zip(order, order[1:]):
            assert fp[hi] <= fp[lo] + 1e-12
            assert sup[hi] >= sup[lo] - 1e-12
        _report(14, f"theta sweep: false positives {fp}, suppression {sup}")

    def test_adaptation_non_decreasing_toward_full_memoryless(self, case_e):
        adapt = _marginal(case_e["rows"], "rho", "newcomer_adaptation_blocks")
        order = ["0.9", "0.99", "1.0"]
        for lo, hi in zip(order, order[1:]):
            assert adapt[hi] >= adapt[lo] - 1e-12
        _report(14, f"newcomer adaptation by memory factor: {adapt}")


# ---------------------------------------------------------------------------
# 1000-validator smoke (explicitly reduced scale)
# ---------------------------------------------------------------------------

class TestLargeNetworkSmoke:
    def test_case_b_1000_runs_at_reduced_scale(self, tmp_path):
        config = with_overrides(
            PRESETS["case-b-fairness-1000"].build(), epochs=20, trials=2,
        )
        summary = run_scenario(config, tmp_path)
        rows = _read_rows(tmp_path)
        assert len(rows) == 4
        assert summary["protocols"]["pob"]["mean_latency_ms"]["mean"] > 0
