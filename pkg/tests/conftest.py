import numpy as np
import pytest

from maxgap.env import ArmSpec, Instance


def streetview_scale_gap_profile():
    """Adjacent gaps (descending rank order) for the 90-arm synthetic instance.

    Safety-score-like structure at desk scale: two arms at the top separated
    from the pack by the largest gap 0.029, then a staircase of runner-up
    gaps (0.024 second-largest, then 0.0235 and 0.023), a 0.018 buffer, and
    a dense ladder below.
    """
    gaps = [0.0015] * 89
    gaps[0] = 0.006
    gaps[1] = 0.029
    gaps[2] = 0.024
    gaps[3] = 0.0235
    gaps[4] = 0.023
    gaps[5] = 0.018
    return gaps


def make_streetview_scale_means():
    means = [0.75]
    for g in streetview_scale_gap_profile():
        means.append(means[-1] - g)
    return means


@pytest.fixture(scope="session")
def streetview_scale_means():
    return make_streetview_scale_means()


@pytest.fixture(scope="session")
def streetview_scale_instance():
    return Instance(
        tuple(ArmSpec(m, 0.05) for m in make_streetview_scale_means())
    )


def check_trace_invariants(trace, instance, atol=1e-9):
    """Assert the per-trace properties every recorded run must satisfy."""
    k = instance.n_arms
    # clusters partition the arm set and are both nonempty
    c1, c2 = trace.clusters
    assert c1 and c2
    assert sorted(c1 + c2) == list(range(k))
    assert trace.total_samples == int(trace.final_counts.sum())

    if trace.round_index.size == 0:
        return

    # gap upper bounds from nested envelopes never increase
    assert np.all(np.diff(trace.upper_right, axis=0) <= atol)
    assert np.all(np.diff(trace.upper_left, axis=0) <= atol)
    assert np.all(np.diff(trace.upper, axis=0) <= atol)

    # at least two arms share the largest upper bound at every record
    top_counts = (trace.upper >= trace.upper.max(axis=1, keepdims=True) - 1e-12).sum(axis=1)
    assert np.all(top_counts >= 2)

    # counts only grow, and only sampled arms grow
    deltas = np.diff(trace.counts, axis=0)
    assert np.all(deltas >= 0)
    assert np.all(deltas[~trace.sampled[1:]] == 0)

    # records where the envelopes contain every true mean: the bounds must
    # bracket the ground truth (upper covers each arm's gap, lower stays
    # below the largest gap)
    mu = instance.means
    contained = np.all((trace.env_l <= mu) & (mu <= trace.env_r), axis=1)
    if contained.any():
        assert np.all(trace.upper[contained] >= instance.gaps[None, :] - atol)
        assert np.all(trace.lower[contained] <= instance.delta_max + atol)


def check_elimination_monotone(trace, instance=None):
    """Active sets shrink and eliminated arms are never sampled again.

    Given the instance, additionally require that the two arms flanking the
    true largest gap survive every round of a run whose envelopes contained
    the truth throughout.
    """
    active = trace.active
    if active.shape[0] == 0:
        return
    assert np.all(active[:-1] | ~active[1:])  # nonincreasing
    deltas = np.diff(trace.counts, axis=0)
    gone = ~active[:-1]
    assert np.all(deltas[gone] == 0)
    if instance is not None and trace.good_event:
        m = instance.split_rank
        upper_flank = int(instance.sorted_order[m - 1])
        lower_flank = int(instance.sorted_order[m])
        assert np.all(active[:, upper_flank])
        assert np.all(active[:, lower_flank])
