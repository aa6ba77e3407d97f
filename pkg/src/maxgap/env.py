"""Problem instances: true arm means, Gaussian noise, and ground-truth gap structure.

An instance is a fixed set of arms, each with a true mean and a sub-Gaussian
noise scale (here: Gaussian standard deviation).  The quantity of interest is
the largest difference between *adjacent* means in sorted order, and the
two-cluster partition it induces.  Instances are immutable after construction
and safe to share across trials; randomness lives entirely in the per-trial
generator passed to the sampling functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "ArmSpec",
    "Instance",
    "InstanceError",
    "sample",
    "sample_block",
    "true_gaps",
    "build_two_gap_instance",
    "build_one_gap_instance",
    "build_lower_bound_instance",
    "load_means_file",
]


class InstanceError(ValueError):
    """Raised when a set of arms does not form a valid problem instance."""


@dataclass(frozen=True)
class ArmSpec:
    """One sampleable arm: true mean and Gaussian noise scale (sigma >= 0)."""

    mean: float
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise InstanceError(f"arm mean must be finite, got {self.mean}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise InstanceError(f"arm sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class Instance:
    """A fixed collection of K >= 3 arms with a unique largest adjacent-mean gap.

    Derived attributes (all cached):

    - ``sorted_order``: arm indices sorted by descending mean; rank ``j``
      (1-based) corresponds to ``sorted_order[j - 1]``.  Ties in means are
      broken by ascending arm index so the ordering is deterministic.
    - ``adjacent_gaps``: the K-1 differences between consecutive sorted means.
    - ``gaps``: per-arm gap, the max of the arm's left and right adjacent
      differences; extreme ranks take their single finite side.
    - ``delta_max`` / ``split_rank``: value and (1-based) rank of the unique
      largest adjacent gap.
    - ``top_cluster`` / ``bottom_cluster``: arm indices above / below the split.

    Construction rejects instances where the largest adjacent gap is tied
    (exact float comparison), since the target partition would be ambiguous.
    """

    arms: tuple[ArmSpec, ...]

    def __post_init__(self) -> None:
        if len(self.arms) < 3:
            raise InstanceError(f"need at least 3 arms, got {len(self.arms)}")
        gaps = self.adjacent_gaps
        best = gaps.max()
        if best <= 0.0 or int((gaps == best).sum()) != 1:
            raise InstanceError(
                "largest adjacent gap must be unique and positive; "
                f"adjacent gaps: {gaps.tolist()}"
            )

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @cached_property
    def means(self) -> np.ndarray:
        return np.array([a.mean for a in self.arms], dtype=float)

    @cached_property
    def sigmas(self) -> np.ndarray:
        return np.array([a.sigma for a in self.arms], dtype=float)

    @cached_property
    def sorted_order(self) -> np.ndarray:
        # Descending mean, ties by ascending arm index (lexsort is stable).
        return np.lexsort((np.arange(self.n_arms), -self.means))

    @cached_property
    def sorted_means(self) -> np.ndarray:
        return self.means[self.sorted_order]

    @cached_property
    def adjacent_gaps(self) -> np.ndarray:
        s = self.sorted_means
        return s[:-1] - s[1:]

    @cached_property
    def delta_max(self) -> float:
        return float(self.adjacent_gaps.max())

    @cached_property
    def split_rank(self) -> int:
        """1-based rank m such that the largest gap lies between ranks m and m+1."""
        return int(np.argmax(self.adjacent_gaps)) + 1

    @cached_property
    def gaps(self) -> np.ndarray:
        """Per-arm gap: max of the two adjacent differences touching the arm."""
        s = self.sorted_means
        k = self.n_arms
        left = np.empty(k)   # gap to the next-smaller mean
        right = np.empty(k)  # gap to the next-larger mean
        left[:-1] = s[:-1] - s[1:]
        left[-1] = -np.inf   # smallest arm has no left gap
        right[1:] = s[:-1] - s[1:]
        right[0] = -np.inf   # largest arm has no right gap
        by_rank = np.maximum(left, right)
        out = np.empty(k)
        out[self.sorted_order] = by_rank
        return out

    @cached_property
    def top_cluster(self) -> tuple[int, ...]:
        return tuple(sorted(int(i) for i in self.sorted_order[: self.split_rank]))

    @cached_property
    def bottom_cluster(self) -> tuple[int, ...]:
        return tuple(sorted(int(i) for i in self.sorted_order[self.split_rank :]))


def true_gaps(instance: Instance):
    """Ground-truth gap summary: (per-arm gaps, delta_max, split rank, clusters)."""
    return (
        instance.gaps.copy(),
        instance.delta_max,
        instance.split_rank,
        (instance.top_cluster, instance.bottom_cluster),
    )


def sample(instance: Instance, arm_index: int, rng: np.random.Generator) -> float:
    """Draw one reward from an arm: mean + sigma * z with z standard normal.

    The draw consumes exactly one normal variate from ``rng``, so identical
    seeds reproduce identical sample sequences.
    """
    if not 0 <= arm_index < instance.n_arms:
        raise IndexError(f"arm index {arm_index} out of range [0, {instance.n_arms})")
    arm = instance.arms[arm_index]
    return arm.mean + arm.sigma * rng.standard_normal()


def sample_block(
    instance: Instance,
    arm_indices: np.ndarray,
    n_rounds: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw ``n_rounds`` rewards from each listed arm; shape (n_rounds, len(arms)).

    Row i holds round i's draws in the given arm order, matching the stream a
    per-round loop over ``sample`` would consume arm-by-arm.
    """
    arm_indices = np.asarray(arm_indices, dtype=int)
    if arm_indices.size and (arm_indices.min() < 0 or arm_indices.max() >= instance.n_arms):
        raise IndexError("arm index out of range")
    z = rng.standard_normal((n_rounds, arm_indices.size))
    return instance.means[arm_indices] + instance.sigmas[arm_indices] * z


def _instance_from_sorted_gaps(
    top_mean: float, gaps_desc: Sequence[float], sigma: float
) -> Instance:
    """Build an instance from the top mean and adjacent gaps in descending rank order.

    Arms are labelled in descending-mean order, so 1-based arm i is rank i.
    """
    means = [top_mean]
    for g in gaps_desc:
        means.append(means[-1] - g)
    return Instance(tuple(ArmSpec(mean=m, sigma=sigma) for m in means))


def build_two_gap_instance() -> Instance:
    """24 unit-variance arms with competing large gaps 0.98 and 1.0.

    Adjacent gaps, top to bottom: 0.2 everywhere except 0.98 between ranks 9
    and 10 and 1.0 between ranks 18 and 19.  The true top cluster is ranks
    1..18 (arm indices 0..17).
    """
    gaps = [0.2] * 23
    gaps[8] = 0.98
    gaps[17] = 1.0
    top = float(sum(gaps))
    return _instance_from_sorted_gaps(top, gaps, sigma=1.0)


def build_one_gap_instance(n_arms: int, delta_min: float, delta_max: float) -> Instance:
    """Ladder of equal small gaps with one large gap at rank floor(K/2)."""
    if n_arms < 3:
        raise InstanceError(f"need at least 3 arms, got {n_arms}")
    if not delta_min < delta_max:
        raise InstanceError(
            f"delta_min must be strictly below delta_max, got {delta_min} >= {delta_max}"
        )
    gaps = [delta_min] * (n_arms - 1)
    gaps[n_arms // 2 - 1] = delta_max
    top = float(sum(gaps))
    return _instance_from_sorted_gaps(top, gaps, sigma=1.0)


def build_lower_bound_instance(nu: float, epsilon: float) -> Instance:
    """Four unit-variance arms with means (2*nu+2*eps, nu+2*eps, eps, 0).

    Arm 4 (index 3) has mean 0; separating it from arm 3 is the hard decision
    that drives the instance's difficulty.  Requires nu > 2*epsilon so the
    largest gap (nu + epsilon, between arms 2 and 3) is unambiguous.
    """
    if not (epsilon > 0 and nu > 2 * epsilon):
        raise InstanceError(f"need nu > 2*epsilon > 0, got nu={nu}, epsilon={epsilon}")
    means = [2 * nu + 2 * epsilon, nu + 2 * epsilon, epsilon, 0.0]
    return Instance(tuple(ArmSpec(mean=m, sigma=1.0) for m in means))


def load_means_file(path: str, sigma: float) -> Instance:
    """Read an instance from a plain text file, one decimal mean per line.

    Arms keep the file's order; all arms share the given sigma.  Fails on
    empty files, unparseable lines, fewer than 3 arms, or a tied largest gap.
    """
    means: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                means.append(float(text))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: cannot parse mean {text!r}") from exc
    if not means:
        raise ValueError(f"{path}: empty means file")
    if len(means) < 3:
        raise InstanceError(f"{path}: need at least 3 means, got {len(means)}")
    return Instance(tuple(ArmSpec(mean=m, sigma=sigma) for m in means))
