import math

import pytest
from hypothesis import given, strategies as st

from pobsim.errors import RewardPoolError
from pobsim.rewards import RewardSchedule, active_set, distribute
from pobsim.weights import WeightTable


class TestActiveSet:
    def test_strict_inequality(self):
        assert active_set({"a": 1.0, "b": 0.0}, beta=0.0) == {"a"}

    def test_negative_score_excluded(self):
        assert active_set({"a": -5.0}, beta=0.0) == set()

    def test_threshold_filter(self):
        scores = {"a": 0.5, "b": 0.6, "c": 0.4}
        assert active_set(scores, beta=0.45) == {"a", "b"}


class TestDistribute:
    def test_single_active_gets_whole_pool(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=10.0)
        table = WeightTable({"a": 0.5, "b": 0.5})
        payouts = distribute(schedule, table, {"a": 1.0, "b": -1.0})
        assert len(payouts) == 1
        assert payouts[0].total == pytest.approx(100.0)

    def test_hand_worked_split(self):
        # bonus = 100 - 2*10 = 80; a: 10 + 80*0.75 = 70; b: 10 + 80*0.25 = 30
        schedule = RewardSchedule(total_reward=100.0, base_reward=10.0)
        table = WeightTable({"a": 0.75, "b": 0.25})
        payouts = {p.validator: p for p in distribute(schedule, table, {"a": 1.0, "b": 1.0})}
        assert payouts["a"].total == pytest.approx(70.0)
        assert payouts["b"].total == pytest.approx(30.0)

    def test_no_active_validators(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=10.0)
        assert distribute(schedule, WeightTable({"a": 1.0}), {"a": -1.0}) == []

    def test_insufficient_pool(self):
        schedule = RewardSchedule(total_reward=15.0, base_reward=10.0)
        table = WeightTable({"a": 0.5, "b": 0.5})
        with pytest.raises(RewardPoolError):
            distribute(schedule, table, {"a": 1.0, "b": 1.0})

    def test_zero_weight_actives_split_bonus_uniformly(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=10.0)
        table = WeightTable({"a": 0.0, "b": 0.0})
        payouts = {p.validator: p for p in distribute(schedule, table, {"a": 1.0, "b": 1.0})}
        assert payouts["a"].total == pytest.approx(50.0)
        assert payouts["b"].total == pytest.approx(50.0)

    def test_zero_weight_active_gets_exactly_base(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=10.0)
        table = WeightTable({"a": 1.0, "b": 0.0})
        payouts = {p.validator: p for p in distribute(schedule, table, {"a": 1.0, "b": 1.0})}
        assert payouts["b"].total == pytest.approx(10.0)

    def test_activeness_multiplier(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=10.0, activeness_epsilon=0.5)
        table = WeightTable({"a": 1.0})
        payouts = distribute(schedule, table, {"a": 1.0}, activeness={"a": 0.8})
        p = payouts[0]
        assert p.activeness_multiplier == pytest.approx(1.4)
        assert p.total == pytest.approx((p.base + p.bonus) * 1.4)

    def test_payout_invariant_total(self):
        schedule = RewardSchedule(total_reward=60.0, base_reward=5.0, activeness_epsilon=0.2)
        table = WeightTable({"a": 0.6, "b": 0.4})
        for p in distribute(schedule, table, {"a": 1.0, "b": 2.0}, {"a": 0.5, "b": 1.0}):
            assert p.total == pytest.approx((p.base + p.bonus) * p.activeness_multiplier)

    @given(
        st.lists(st.floats(0.0, 5.0), min_size=1, max_size=10),
        st.lists(st.floats(-2.0, 5.0), min_size=10, max_size=10),
    )
    def test_conservation_at_zero_epsilon(self, weights, scores):
        ids = [f"v{i}" for i in range(10)]
        table = WeightTable(dict(zip(ids, weights + [0.0] * (10 - len(weights)))))
        score_map = dict(zip(ids, scores))
        schedule = RewardSchedule(total_reward=100.0, base_reward=1.0)
        payouts = distribute(schedule, table, score_map)
        if payouts:
            assert math.isclose(sum(p.total for p in payouts), 100.0, abs_tol=1e-9)

    def test_monotone_in_weight_among_equal_activeness(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=5.0)
        table = WeightTable({"a": 0.5, "b": 0.3, "c": 0.2})
        scores = {"a": 1.0, "b": 1.0, "c": 1.0}
        payouts = {p.validator: p.total for p in distribute(schedule, table, scores)}
        assert payouts["a"] >= payouts["b"] >= payouts["c"]

    def test_floor_at_base_reward(self):
        schedule = RewardSchedule(total_reward=100.0, base_reward=7.0)
        table = WeightTable({"a": 1.0, "b": 0.0, "c": 0.0})
        scores = {"a": 1.0, "b": 0.5, "c": 0.5}
        for p in distribute(schedule, table, scores):
            assert p.total >= 7.0 - 1e-12

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            RewardSchedule(total_reward=-1.0, base_reward=0.0)
        with pytest.raises(ValueError):
            RewardSchedule(total_reward=1.0, base_reward=-0.5)
