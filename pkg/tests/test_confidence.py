import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxgap.confidence import (
    ArmStats,
    IntervalState,
    IntervalTracker,
    good_event_holds,
    radius,
    update,
)
from maxgap.env import ArmSpec, Instance


class TestRadius:
    def test_closed_form_value(self):
        # direct evaluation: sqrt(2 * log(4*4*1/0.1)) = sqrt(2 log 160);
        # the factor 2 is required for the anytime coverage guarantee (the
        # sqrt(log 160) = 2.2528 variant fails it measurably)
        assert radius(1, 4, 0.1, 1.0) == pytest.approx(
            math.sqrt(2.0 * math.log(160.0)), abs=1e-12
        )
        assert radius(1, 4, 0.1, 1.0) == pytest.approx(
            math.sqrt(2.0) * 2.2528, abs=1e-3
        )

    def test_linear_sigma_scaling(self):
        assert radius(10, 4, 0.1, 2.0) == pytest.approx(2.0 * radius(10, 4, 0.1, 1.0))
        assert radius(10, 4, 0.1, 0.0) == 0.0

    def test_inverse_sqrt_count_shape(self):
        # quadrupling the count roughly halves the radius (log factor aside)
        big, other = radius(400_000, 4, 0.1, 1.0), radius(100_000, 4, 0.1, 1.0)
        assert big / other == pytest.approx(0.5, rel=0.1)

    def test_decreasing_and_vanishing(self):
        vals = [radius(s, 6, 0.05, 1.0) for s in range(1, 2000)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert radius(10**9, 6, 0.05, 1.0) < 1e-3

    def test_sqrt_log_factor_nondecreasing(self):
        # radius(s) * sqrt(s) / sigma is the sqrt-log factor, nondecreasing in s
        vals = [radius(s, 4, 0.1, 1.0) * math.sqrt(s) for s in range(1, 500)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            radius(0, 4, 0.1, 1.0)
        with pytest.raises(ValueError):
            radius(1, 4, 1.5, 1.0)
        with pytest.raises(ValueError):
            radius(1, 4, 0.1, -1.0)


class TestUpdate:
    def test_first_sample(self):
        stats, state = update(ArmStats(), IntervalState(), 0.5, 4, 0.1, 1.0)
        c = radius(1, 4, 0.1, 1.0)
        assert stats.count == 1 and stats.empirical_mean == 0.5
        assert state.l == pytest.approx(0.5 - c) and state.r == pytest.approx(0.5 + c)
        assert state.l_env == state.l and state.r_env == state.r

    def test_mean_undefined_before_first_sample(self):
        with pytest.raises(ValueError):
            ArmStats().empirical_mean

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=60)
    )
    def test_envelopes_monotone_and_nested(self, xs):
        stats, state = ArmStats(), IntervalState()
        history = []
        for x in xs:
            prev = state
            stats, state = update(stats, state, x, 4, 0.1, 1.0)
            assert state.l_env >= prev.l_env
            assert state.r_env <= prev.r_env
            history.append(state)
        # envelope lies inside every historical raw interval
        final = history[-1]
        for st_ in history:
            assert final.l_env >= st_.l - 1e-12
            assert final.r_env <= st_.r + 1e-12

    def test_tracker_matches_scalar_updates(self):
        rng = np.random.default_rng(5)
        k = 4
        tracker = IntervalTracker(k, np.full(k, 1.3), delta=0.2)
        stats = [ArmStats() for _ in range(k)]
        states = [IntervalState() for _ in range(k)]
        for _ in range(50):
            arm = int(rng.integers(k))
            x = float(rng.normal())
            tracker.add(np.array([arm]), np.array([[x]]))
            tracker.refresh()
            stats[arm], states[arm] = update(stats[arm], states[arm], x, k, 0.2, 1.3)
        got = tracker.states()
        for a in range(k):
            if stats[a].count == 0:
                continue
            assert got[a].l == pytest.approx(states[a].l, abs=1e-12)
            assert got[a].r == pytest.approx(states[a].r, abs=1e-12)
            assert got[a].l_env == pytest.approx(states[a].l_env, abs=1e-12)
            assert got[a].r_env == pytest.approx(states[a].r_env, abs=1e-12)


class TestCoverage:
    def test_anytime_coverage_monte_carlo(self):
        # 500 trials of 1e4 updates on N(0,1) with delta=0.05: the true mean
        # stays inside the raw interval at every step in >= 95% of trials.
        trials, steps, delta, k = 500, 10_000, 0.05, 4
        rng = np.random.default_rng(123)
        draws = rng.standard_normal((trials, steps))
        means = np.cumsum(draws, axis=1) / np.arange(1, steps + 1)
        s = np.arange(1, steps + 1, dtype=float)
        c = np.sqrt(2.0 * np.log(4.0 * k * s * s / delta) / s)
        covered_all = np.all(np.abs(means) <= c, axis=1)
        assert covered_all.mean() >= 0.95

    def test_good_event_zero_noise(self):
        inst = Instance(tuple(ArmSpec(m, 0.0) for m in [0.0, 1.0, 3.0]))
        tracker = IntervalTracker(3, inst.sigmas, 0.1)
        tracker.add(np.arange(3), inst.means[None, :])
        tracker.refresh()
        assert good_event_holds(inst, tracker.states())
        assert good_event_holds(inst, tracker.states(), use_envelope=True)

    def test_good_event_detects_escape(self):
        inst = Instance(tuple(ArmSpec(m, 1.0) for m in [0.0, 1.0, 3.0]))
        states = [
            IntervalState(l=-1.0, r=1.0, l_env=-1.0, r_env=1.0),
            IntervalState(l=0.5, r=0.6, l_env=0.5, r_env=0.6),  # misses mean 1.0
            IntervalState(l=2.0, r=4.0, l_env=2.0, r_env=4.0),
        ]
        assert not good_event_holds(inst, states)

    def test_good_event_requires_samples(self):
        inst = Instance(tuple(ArmSpec(m, 1.0) for m in [0.0, 1.0, 3.0]))
        with pytest.raises(ValueError):
            good_event_holds(inst, [IntervalState()] * 3)

    def test_good_event_rate_over_runs(self):
        # envelope containment at the end of a run is equivalent to raw
        # containment at every refresh; failure rate must stay below delta.
        delta, trials, steps, k = 0.1, 500, 2000, 4
        means = np.array([0.0, 0.3, 1.0, 2.0])
        rng = np.random.default_rng(77)
        fails = 0
        s = np.arange(1, steps + 1, dtype=float)
        c = np.sqrt(2.0 * np.log(4.0 * k * s * s / delta) / s)
        for _ in range(trials):
            draws = rng.standard_normal((steps, k)) + means
            paths = np.cumsum(draws, axis=0) / s[:, None]
            l_env = (paths - c[:, None]).max(axis=0)
            r_env = (paths + c[:, None]).min(axis=0)
            if not np.all((l_env <= means) & (means <= r_env)):
                fails += 1
        assert fails / trials <= delta
