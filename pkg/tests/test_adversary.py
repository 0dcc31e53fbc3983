import math

import pytest

from hourahead import (
    BudgetExceededError,
    DiscretizationConfig,
    PenaltyParams,
    PriceBounds,
    StorageSpec,
    StrategyConfig,
    ThresholdPolicy,
    Trace,
    UNBOUNDED,
    ValidationError,
    empirical_cr,
    theoretical_cr,
)
from hourahead.adversary import (
    AdversaryGrid,
    StepFunction,
    adversarial_search,
    local_cr_closed_form,
    step_lengths_from_equalization,
)
from hourahead.strategies import fixed_threshold_strategy, socs_strategy


class TestStepFunction:
    def test_boundaries_and_capacity(self):
        sf = StepFunction((40.0, 20.0, 10.0), (1.0, 4.0, 5.0))
        assert sf.n == 3
        assert sf.capacity == 10.0
        assert sf.boundaries() == (1.0, 5.0, 10.0)

    def test_rejects_increasing_prices(self):
        with pytest.raises(ValidationError):
            StepFunction((10.0, 20.0), (5.0, 5.0))

    def test_rejects_negative_lengths(self):
        with pytest.raises(ValidationError):
            StepFunction((20.0, 10.0), (-1.0, 5.0))

    def test_from_policy_spans_price_range(self):
        pol = ThresholdPolicy.build(PriceBounds(10.0, 40.0), 20.0)
        sf = StepFunction.from_policy(pol, 50)
        assert sf.prices[0] == pol.bounds.p_max
        assert sf.prices[-1] == pol.bounds.p_min
        assert sf.capacity == pytest.approx(20.0, rel=1e-12)
        assert sf.lengths[-1] == pytest.approx(pol.l_n)

    def test_from_policy_degenerate(self):
        pol = ThresholdPolicy.build(PriceBounds(10.0, 10.0), 20.0)
        sf = StepFunction.from_policy(pol, 50)
        assert sf.capacity == 20.0


class TestLocalRatioClosedForm:
    def test_two_step_hand_value(self):
        sf = StepFunction((40.0, 10.0), (5.0, 5.0))
        assert local_cr_closed_form(sf, 1) == pytest.approx(40.0 * 10.0 / (10.0 * 5.0))

    def test_flat_curve_is_one(self):
        sf = StepFunction((10.0, 10.0), (0.0, 10.0))
        assert local_cr_closed_form(sf, 1) == 1.0

    def test_index_bounds(self):
        sf = StepFunction((40.0, 10.0), (5.0, 5.0))
        with pytest.raises(ValidationError):
            local_cr_closed_form(sf, 0)
        with pytest.raises(ValidationError):
            local_cr_closed_form(sf, 2)

    @pytest.mark.parametrize("theta", [2.0, 10.0, 50.0])
    def test_discretized_curve_equalizes(self, theta):
        pol = ThresholdPolicy.build(PriceBounds(10.0, 10.0 * theta), 20.0)
        sf = StepFunction.from_policy(pol, 200)
        ratios = [local_cr_closed_form(sf, i) for i in range(1, sf.n)]
        spread = (max(ratios) - min(ratios)) / min(ratios)
        assert spread <= 0.02
        assert abs(max(ratios) - theoretical_cr(theta)) <= 0.02 * theoretical_cr(theta)

    def test_spread_shrinks_with_refinement(self):
        pol = ThresholdPolicy.build(PriceBounds(10.0, 500.0), 20.0)

        def spread(steps):
            sf = StepFunction.from_policy(pol, steps)
            ratios = [local_cr_closed_form(sf, i) for i in range(1, sf.n)]
            return (max(ratios) - min(ratios)) / min(ratios)

        coarse, fine = spread(200), spread(1000)
        assert fine < coarse / 3.0  # roughly linear in the step width


class TestEqualizedLengths:
    def test_equal_prices_give_zero_length(self):
        lengths = step_lengths_from_equalization((40.0, 25.0, 25.0, 10.0), 20.0, 5.0)
        assert lengths[1] == 0.0

    def test_three_step_equalization(self):
        # build a three-step curve whose interior length comes from the
        # closed form, then check both local ratios coincide
        prices = (40.0, 20.0, 10.0)
        capacity, l_n = 10.0, 3.0
        (l_2,) = step_lengths_from_equalization(prices, capacity, l_n)
        sf = StepFunction(prices, (capacity - l_2 - l_n, l_2, l_n))
        r1 = local_cr_closed_form(sf, 1)
        r2 = local_cr_closed_form(sf, 2)
        assert r1 == pytest.approx(r2, rel=1e-12)

    def test_reproduces_policy_grid(self):
        pol = ThresholdPolicy.build(PriceBounds(10.0, 10.0 * math.e**2), 20.0)
        sf = StepFunction.from_policy(pol, 200)
        lengths = step_lengths_from_equalization(sf.prices, sf.capacity, sf.lengths[-1])
        total = sf.lengths[0] + sum(lengths) + sf.lengths[-1]
        assert total == pytest.approx(20.0, rel=0.01)

    def test_degenerate_denominator(self):
        with pytest.raises(ValidationError):
            step_lengths_from_equalization((40.0, 20.0, 10.0), 1.0, 2.0)
        with pytest.raises(ValidationError):
            # p_{n-1} C ~ p_n l_n makes the shared factor blow up
            step_lengths_from_equalization((40.0, 10.0, 10.0), 1.0, 1.0 - 1e-14)


def full_storage_spec(capacity):
    # rate-unconstrained storage: the regime the worst-case guarantee covers
    return StorageSpec(capacity, capacity, capacity)


class TestAdversarialSearch:
    def test_budget_guard(self):
        grid = AdversaryGrid.geometric(
            PriceBounds(10.0, 40.0), 4.0, horizon=4, budget=100
        )
        with pytest.raises(BudgetExceededError):
            adversarial_search(grid, lambda *a: None, full_storage_spec(4.0))

    def test_known_price_strategy_stays_under_bound(self):
        bounds = PriceBounds(10.0, 40.0)
        spec = full_storage_spec(4.0)
        pol = ThresholdPolicy.build(bounds, spec.capacity)
        grid = AdversaryGrid.geometric(bounds, spec.capacity, horizon=3, levels=4)
        report = adversarial_search(
            grid,
            socs_strategy(StrategyConfig(pol, spec)),
            spec,
            theoretical_bound=pol.cr_value,
        )
        assert report.instances == grid.instance_count
        assert not isinstance(report.max_ratio, type(UNBOUNDED))
        assert report.max_ratio <= pol.cr_value * 1.05
        assert not report.exceeds_bound()

    def test_flat_price_grid_ratio_is_one(self):
        bounds = PriceBounds(10.0, 10.0)
        spec = full_storage_spec(4.0)
        pol = ThresholdPolicy.build(bounds, spec.capacity)
        grid = AdversaryGrid.geometric(bounds, spec.capacity, horizon=2, levels=4)
        report = adversarial_search(grid, socs_strategy(StrategyConfig(pol, spec)), spec)
        assert report.max_ratio == pytest.approx(1.0, abs=1e-9)

    def test_bucket_max_equals_global_max(self):
        bounds = PriceBounds(10.0, 40.0)
        spec = full_storage_spec(4.0)
        pol = ThresholdPolicy.build(bounds, spec.capacity)
        grid = AdversaryGrid.geometric(bounds, spec.capacity, horizon=3, levels=4)
        report = adversarial_search(grid, socs_strategy(StrategyConfig(pol, spec)), spec)
        assert max(report.bucket_ratios.values()) == report.max_ratio

    def test_always_sell_policy_bounded_by_theta(self):
        bounds = PriceBounds(10.0, 40.0)
        spec = full_storage_spec(4.0)
        grid = AdversaryGrid.geometric(bounds, spec.capacity, horizon=3, levels=4)
        report = adversarial_search(grid, fixed_threshold_strategy(bounds.p_min, spec), spec)
        assert report.max_ratio <= bounds.theta + 1e-9

    def test_stubborn_threshold_unbounded_on_low_prices(self, penalty):
        # a threshold strictly above p_min never sells on an all-low trace
        spec = full_storage_spec(4.0)
        trace = Trace.from_series([10.0] * 3, [1.0] * 3)
        disc = DiscretizationConfig.for_capacity(4.0, 4)
        ratio = empirical_cr(
            trace, spec, penalty, fixed_threshold_strategy(20.0, spec), disc
        )
        assert ratio is UNBOUNDED

    def test_unbounded_reported_by_search(self):
        bounds = PriceBounds(10.0, 40.0)
        spec = full_storage_spec(4.0)
        grid = AdversaryGrid.geometric(bounds, spec.capacity, horizon=2, levels=4)
        report = adversarial_search(grid, fixed_threshold_strategy(20.0, spec), spec)
        assert report.max_ratio is UNBOUNDED
        assert report.exceeds_bound() is False  # no bound attached
        low = report.bucket_ratios[min(report.bucket_ratios)]
        assert low is UNBOUNDED or low >= 1.0


class TestGridValidation:
    def test_horizon_limits(self):
        disc = DiscretizationConfig.for_capacity(4.0, 4)
        with pytest.raises(ValidationError):
            AdversaryGrid(7, (10.0,), (0.0,), disc)
        with pytest.raises(ValidationError):
            AdversaryGrid(2, (), (0.0,), disc)

    def test_geometric_ladder(self):
        grid = AdversaryGrid.geometric(PriceBounds(10.0, 80.0), 4.0, price_count=4)
        assert grid.price_levels[0] == pytest.approx(10.0)
        assert grid.price_levels[-1] == pytest.approx(80.0)
        ratios = [b / a for a, b in zip(grid.price_levels, grid.price_levels[1:])]
        assert ratios == pytest.approx([2.0, 2.0, 2.0])
