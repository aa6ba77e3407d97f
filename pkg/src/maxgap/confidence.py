"""Per-arm empirical statistics and anytime confidence intervals.

Two interval forms are maintained.  The raw interval after s samples is
``mean_hat +- radius(s)`` with
``radius(s) = sigma * sqrt(2 * log(4*K*s^2/delta) / s)``, an anytime
sub-Gaussian bound: a union bound over arms and sample counts gives
``sum_a sum_s 2 exp(-s c_s^2 / (2 sigma^2)) = (pi^2/12) delta < delta``, so
with probability at least 1-delta every arm's true mean lies inside its raw
interval at every step.  (Without the factor 2 the union bound diverges and
the coverage guarantee measurably fails.)  The monotone envelope
keeps the running max of lower bounds and running min of upper bounds, so
envelopes are nested over time and contain the true mean at every step exactly
when the raw intervals always did.  Algorithms consume the envelope form; raw
intervals remain available for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .env import Instance

__all__ = [
    "radius",
    "ArmStats",
    "IntervalState",
    "update",
    "good_event_holds",
    "IntervalTracker",
]


def radius(count: int, n_arms: int, delta: float, sigma: float) -> float:
    """Anytime confidence radius after ``count`` samples of one arm.

    Scales linearly in sigma; strictly decreasing in the count over the
    relevant range and vanishing as count grows.  The count must be >= 1
    (no interval exists before the first sample).
    """
    if count < 1:
        raise ValueError(f"interval undefined before the first sample (count={count})")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if n_arms < 2:
        raise ValueError(f"need at least 2 arms, got {n_arms}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    s = float(count)
    return sigma * math.sqrt(2.0 * math.log(4.0 * n_arms * s * s / delta) / s)


@dataclass(frozen=True)
class ArmStats:
    """Sample count and running sum for one arm."""

    count: int = 0
    total: float = 0.0

    @property
    def empirical_mean(self) -> float:
        if self.count < 1:
            raise ValueError("empirical mean undefined before the first sample")
        return self.total / self.count


@dataclass(frozen=True)
class IntervalState:
    """Raw interval [l, r] plus the monotone envelope [l_env, r_env]."""

    l: float = -math.inf
    r: float = math.inf
    l_env: float = -math.inf
    r_env: float = math.inf


def update(
    stats: ArmStats,
    state: IntervalState,
    new_sample: float,
    n_arms: int,
    delta: float,
    sigma: float,
) -> tuple[ArmStats, IntervalState]:
    """Fold one sample into an arm's stats and intervals, functionally."""
    stats2 = ArmStats(count=stats.count + 1, total=stats.total + new_sample)
    c = radius(stats2.count, n_arms, delta, sigma)
    mean = stats2.empirical_mean
    l, r = mean - c, mean + c
    return stats2, IntervalState(
        l=l, r=r, l_env=max(state.l_env, l), r_env=min(state.r_env, r)
    )


def good_event_holds(
    instance: Instance,
    interval_states: Sequence[IntervalState],
    use_envelope: bool = False,
) -> bool:
    """True iff every arm's true mean lies inside its current interval.

    A diagnostic that peeks at ground truth.  With ``use_envelope`` the check
    runs against the monotone envelopes, which is equivalent to the raw
    intervals having contained the mean at every past update.
    """
    if len(interval_states) != instance.n_arms:
        raise ValueError("one interval state per arm required")
    for mu, st in zip(instance.means, interval_states):
        lo, hi = (st.l_env, st.r_env) if use_envelope else (st.l, st.r)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("arm has no interval yet (unsampled)")
        if not lo <= mu <= hi:
            return False
    return True


class IntervalTracker:
    """Vectorized counts, sums, and intervals for all arms of one run.

    ``add`` accumulates samples cheaply; ``refresh`` recomputes raw intervals
    and tightens the envelopes for every sampled arm.  Matches the scalar
    ``update`` path arm-for-arm when refreshed after every sample.
    """

    def __init__(self, n_arms: int, sigmas: np.ndarray, delta: float):
        if n_arms < 3:
            raise ValueError(f"need at least 3 arms, got {n_arms}")
        self.n_arms = n_arms
        self.sigmas = np.asarray(sigmas, dtype=float)
        self.delta = float(delta)
        self.counts = np.zeros(n_arms, dtype=np.int64)
        self.sums = np.zeros(n_arms, dtype=float)
        self.l_raw = np.full(n_arms, -np.inf)
        self.r_raw = np.full(n_arms, np.inf)
        self.l_env = np.full(n_arms, -np.inf)
        self.r_env = np.full(n_arms, np.inf)

    def add(self, arm_indices: np.ndarray, draws: np.ndarray) -> None:
        """Accumulate a (n_rounds, len(arm_indices)) block of draws.

        Indices may repeat (an arm drawn twice per round); contributions
        accumulate per occurrence.
        """
        np.add.at(self.counts, arm_indices, draws.shape[0])
        np.add.at(self.sums, arm_indices, draws.sum(axis=0))

    @property
    def means(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.counts > 0, self.sums / self.counts, np.nan)

    def refresh(self) -> None:
        sampled = self.counts > 0
        s = self.counts[sampled].astype(float)
        c = self.sigmas[sampled] * np.sqrt(
            2.0 * np.log(4.0 * self.n_arms * s * s / self.delta) / s
        )
        mean = self.sums[sampled] / s
        self.l_raw[sampled] = mean - c
        self.r_raw[sampled] = mean + c
        np.maximum(self.l_env, self.l_raw, out=self.l_env)
        np.minimum(self.r_env, self.r_raw, out=self.r_env)

    def states(self) -> list[IntervalState]:
        return [
            IntervalState(
                l=float(self.l_raw[a]),
                r=float(self.r_raw[a]),
                l_env=float(self.l_env[a]),
                r_env=float(self.r_env[a]),
            )
            for a in range(self.n_arms)
        ]

    def contains_truth(self, instance: Instance) -> bool:
        """Envelope containment of all true means; equivalent to the raw
        intervals having covered the truth at every refresh so far."""
        return bool(
            np.all((self.l_env <= instance.means) & (instance.means <= self.r_env))
        )
