import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxgap.env import (
    ArmSpec,
    Instance,
    InstanceError,
    build_lower_bound_instance,
    build_one_gap_instance,
    build_two_gap_instance,
    load_means_file,
    sample,
    sample_block,
    true_gaps,
)


def make_instance(means, sigma=1.0):
    return Instance(tuple(ArmSpec(m, sigma) for m in means))


class TestInstanceBasics:
    def test_rejects_fewer_than_three_arms(self):
        with pytest.raises(InstanceError):
            make_instance([0.0, 1.0])

    def test_rejects_tied_max_gap(self):
        with pytest.raises(InstanceError):
            make_instance([0.0, 1.0, 2.0])

    def test_rejects_all_equal_means(self):
        with pytest.raises(InstanceError):
            make_instance([1.0, 1.0, 1.0])

    def test_rejects_nonfinite_mean_and_negative_sigma(self):
        with pytest.raises(InstanceError):
            ArmSpec(math.nan, 1.0)
        with pytest.raises(InstanceError):
            ArmSpec(0.0, -0.5)

    def test_three_point_gaps(self):
        # means [0, 1, 3]: the middle arm's gap is max{1, 2} = 2
        inst = make_instance([0.0, 1.0, 3.0])
        gaps, dmax, m, (c1, c2) = true_gaps(inst)
        assert gaps[1] == 2.0
        assert gaps[0] == 1.0  # bottom arm: single right-side gap
        assert gaps[2] == 2.0  # top arm: single left-side gap
        assert dmax == 2.0
        assert m == 1
        assert c1 == (2,) and c2 == (0, 1)

    def test_extreme_arm_takes_single_finite_gap(self):
        inst = make_instance([0.0, 0.5, 2.0, 2.2])
        # top arm (index 3): only its left-side difference counts
        assert inst.gaps[3] == pytest.approx(0.2)
        assert inst.gaps[0] == pytest.approx(0.5)

    def test_duplicate_means_allowed_when_max_gap_unique(self):
        inst = make_instance([0.0, 0.0, 1.0])
        assert inst.delta_max == 1.0
        assert inst.split_rank == 1


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-100, max_value=100, allow_nan=False),
        min_size=3,
        max_size=12,
        unique=True,
    )
)
def test_gap_properties_random_instances(means):
    try:
        inst = make_instance(means)
    except InstanceError:
        return  # tied max gap
    s = inst.sorted_means
    # adjacent gaps telescope to the full span
    assert inst.adjacent_gaps.sum() == pytest.approx(s[0] - s[-1], abs=1e-9)
    # delta_max is the largest adjacent sorted difference
    assert inst.delta_max == max(s[j] - s[j + 1] for j in range(len(means) - 1))
    # each arm's gap is the max over the sides touching it
    order = inst.sorted_order
    for rank, arm in enumerate(order):
        sides = []
        if rank > 0:
            sides.append(s[rank - 1] - s[rank])
        if rank < len(means) - 1:
            sides.append(s[rank] - s[rank + 1])
        assert inst.gaps[arm] == pytest.approx(max(sides))
    # clusters partition the arms
    assert sorted(inst.top_cluster + inst.bottom_cluster) == list(range(len(means)))


class TestSampling:
    def test_zero_noise_arm_is_deterministic(self):
        inst = make_instance([0.1, 0.7, 1.5], sigma=0.0)
        rng = np.random.default_rng(0)
        assert all(sample(inst, 1, rng) == 0.7 for _ in range(5))

    def test_same_seed_same_samples(self):
        inst = make_instance([0.0, 1.0, 3.0])
        a = [sample(inst, 1, np.random.default_rng(42)) for _ in range(1)]
        b = [sample(inst, 1, np.random.default_rng(42)) for _ in range(1)]
        rng1, rng2 = np.random.default_rng(7), np.random.default_rng(7)
        pair1 = (sample(inst, 2, rng1), sample(inst, 2, rng1))
        pair2 = (sample(inst, 2, rng2), sample(inst, 2, rng2))
        assert a == b and pair1 == pair2

    def test_block_matches_sequential_draws(self):
        inst = make_instance([0.0, 1.0, 3.0])
        block = sample_block(inst, np.array([0, 2]), 4, np.random.default_rng(3))
        rng = np.random.default_rng(3)
        seq = [[sample(inst, 0, rng), sample(inst, 2, rng)] for _ in range(4)]
        assert np.allclose(block, seq)

    def test_law_of_large_numbers(self):
        # 1e5 standard normal samples: empirical mean within 0.02 of zero
        inst = make_instance([0.0, 1.0, 3.0])
        draws = sample_block(inst, np.array([0]), 100_000, np.random.default_rng(11))
        assert abs(draws.mean()) < 0.02

    def test_out_of_range_arm(self):
        inst = make_instance([0.0, 1.0, 3.0])
        with pytest.raises(IndexError):
            sample(inst, 3, np.random.default_rng(0))


class TestBuilders:
    def test_two_gap_instance(self):
        inst = build_two_gap_instance()
        assert inst.n_arms == 24
        assert inst.delta_max == 1.0
        assert inst.split_rank == 18
        assert sorted(inst.adjacent_gaps)[-2] == 0.98
        assert inst.top_cluster == tuple(range(18))
        assert np.all(inst.sigmas == 1.0)

    def test_one_gap_instance_k4(self):
        inst = build_one_gap_instance(4, 0.1, 1.0)
        assert sorted(inst.means) == pytest.approx([0.0, 0.1, 1.1, 1.2])
        assert inst.delta_max == pytest.approx(1.0)
        assert inst.split_rank == 2

    def test_one_gap_rejects_tied_gaps(self):
        with pytest.raises(InstanceError):
            build_one_gap_instance(4, 1.0, 1.0)
        with pytest.raises(InstanceError):
            build_one_gap_instance(4, 2.0, 1.0)

    def test_lower_bound_instance(self):
        inst = build_lower_bound_instance(1.0, 0.1)
        # arms labelled in descending-mean order: arm 4 (index 3) has mean 0
        assert inst.means.tolist() == pytest.approx([2.2, 1.2, 0.1, 0.0])
        assert inst.delta_max == pytest.approx(1.1)
        assert inst.top_cluster == (0, 1)

    def test_lower_bound_shifted_alternative_moves_the_split(self):
        # shifting the bottom arm up by 2.1*eps relocates the largest gap
        base = build_lower_bound_instance(1.0, 0.1)
        shifted = make_instance([2.2, 1.2, 0.1, 0.21])
        assert shifted.delta_max == pytest.approx(1.0)
        assert shifted.top_cluster == (0,)
        assert base.top_cluster != shifted.top_cluster

    def test_lower_bound_rejects_small_nu(self):
        with pytest.raises(InstanceError):
            build_lower_bound_instance(0.15, 0.1)


class TestMeansFile:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "means.txt"
        p.write_text("0.0\n0.5\n1.0\n1.6\n")
        inst = load_means_file(str(p), sigma=0.05)
        assert inst.n_arms == 4
        assert inst.delta_max == pytest.approx(0.6)
        assert np.all(inst.sigmas == 0.05)
        assert inst.means.tolist() == [0.0, 0.5, 1.0, 1.6]

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("")
        with pytest.raises(ValueError):
            load_means_file(str(p), sigma=1.0)

    def test_parse_failure_reports_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("0.1\noops\n0.3\n")
        with pytest.raises(ValueError, match="2"):
            load_means_file(str(p), sigma=1.0)

    def test_too_few_means(self, tmp_path):
        p = tmp_path / "two.txt"
        p.write_text("0.0\n1.0\n")
        with pytest.raises(InstanceError):
            load_means_file(str(p), sigma=1.0)

    def test_streetview_scale_file(self, tmp_path, streetview_scale_means):
        p = tmp_path / "sv.txt"
        p.write_text("\n".join(repr(m) for m in streetview_scale_means) + "\n")
        inst = load_means_file(str(p), sigma=0.05)
        assert inst.n_arms == 90
        assert inst.delta_max == pytest.approx(0.029)
        assert sorted(inst.adjacent_gaps)[-2] == pytest.approx(0.024)
