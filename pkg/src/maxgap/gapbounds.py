"""Confidence bounds on gaps, derived from per-arm mean intervals.

Given one interval [l_a, r_a] per arm, ``upper_gap`` computes the largest
right/left adjacent-mean gap any assignment of means consistent with all
intervals could give arm ``a``.  The key fact is that the optimum is attained
with the arm pinned at one of finitely many anchor positions: the left
endpoints of intervals falling inside [l_a, r_a] for the right gap (right
endpoints for the left gap).  Evaluating the anchor function at those points
yields an exact bound in O(K^2) total for all arms.

``brute_force_upper_gap`` independently maximizes the same objective by
enumerating candidate endpoint placements and checking, per configuration,
that every other arm can be placed outside the open gap interval.  It is the
cross-validation oracle for the fast path and is exponential-flavored, so it
is restricted to small K.

``lower_max_gap`` certifies a global lower bound on the largest gap: order
arms by empirical mean and find the split whose top-group lower bounds clear
the bottom-group upper bounds by the widest margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "IntervalSnapshot",
    "GapBounds",
    "right_anchor_gap",
    "left_anchor_gap",
    "upper_gap",
    "upper_gaps",
    "lower_max_gap",
    "compute_gap_bounds",
    "brute_force_upper_gap",
]

BRUTE_FORCE_MAX_ARMS = 8


@dataclass(frozen=True)
class IntervalSnapshot:
    """Per-arm intervals at a fixed time; arrays indexed by arm."""

    l: np.ndarray
    r: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "l", np.asarray(self.l, dtype=float))
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        if self.l.shape != self.r.shape or self.l.ndim != 1:
            raise ValueError("l and r must be 1-d arrays of equal length")
        if self.l.size < 3:
            raise ValueError("need at least 3 arms")
        if not np.all(self.l <= self.r):
            raise ValueError("every interval needs l <= r")

    @property
    def n_arms(self) -> int:
        return self.l.size


@dataclass(frozen=True)
class GapBounds:
    """Gap bounds at one time step.

    ``upper_right`` / ``upper_left`` / ``upper`` are per-arm; ``lower`` is the
    certified global lower bound on the largest gap (may be negative when no
    split is separated).  ``anchor_right`` / ``anchor_left`` record, per arm,
    the arm whose endpoint served as the maximizing anchor.  ``split_size`` is
    the number of top-group arms in the maximizing split and
    ``lower_witness`` the (top-group arm, bottom-group arm) pair attaining it.
    """

    upper_right: np.ndarray
    upper_left: np.ndarray
    upper: np.ndarray
    lower: float
    anchor_right: np.ndarray
    anchor_left: np.ndarray
    split_size: int
    lower_witness: tuple[int, int]

    @cached_property
    def argmax_upper(self) -> tuple[int, ...]:
        top = self.upper.max()
        return tuple(int(i) for i in np.flatnonzero(self.upper == top))


def right_anchor_gap(a: int, x: float, snapshot: IntervalSnapshot) -> float:
    """Largest possible right gap of arm ``a`` were its mean exactly ``x``.

    If some other arm's interval lies entirely right of ``x`` (its lower
    endpoint exceeds ``x``), the nearest such arm caps the gap: take the
    smallest upper endpoint among them.  Otherwise every other arm can slide
    left of ``x`` except one pushed to its upper endpoint, so the gap is the
    largest other upper endpoint minus ``x`` (possibly negative).
    """
    l, r = snapshot.l, snapshot.r
    others = np.arange(snapshot.n_arms) != a
    forced_right = others & (l > x)
    if forced_right.any():
        return float(r[forced_right].min() - x)
    return float(r[others].max() - x)


def left_anchor_gap(a: int, x: float, snapshot: IntervalSnapshot) -> float:
    """Mirror of ``right_anchor_gap``: largest possible left gap at position ``x``."""
    l, r = snapshot.l, snapshot.r
    others = np.arange(snapshot.n_arms) != a
    forced_left = others & (r < x)
    if forced_left.any():
        return float(x - l[forced_left].max())
    return float(x - l[others].min())


def upper_gap(a: int, snapshot: IntervalSnapshot) -> tuple[float, float, float]:
    """(right, left, combined) gap upper bounds for one arm.

    Anchors for the right bound are the left endpoints inside [l_a, r_a]
    (closed on both sides, the arm's own included); mirror for the left.
    """
    l, r = snapshot.l, snapshot.r
    la, ra = l[a], r[a]
    right_anchors = np.append(l[(l >= la) & (l <= ra)], la)
    ud_r = max(right_anchor_gap(a, float(x), snapshot) for x in right_anchors)
    left_anchors = np.append(r[(r >= la) & (r <= ra)], ra)
    ud_l = max(left_anchor_gap(a, float(x), snapshot) for x in left_anchors)
    return ud_r, ud_l, max(ud_r, ud_l)


def _grouped_anchor_max(
    vals: np.ndarray, owners: np.ndarray, seg_offsets: np.ndarray, n_arms: int
) -> tuple[np.ndarray, np.ndarray]:
    """Segmented max plus the owner of the maximizing anchor per segment."""
    best = np.maximum.reduceat(vals, seg_offsets)
    seg_ids = np.repeat(np.arange(n_arms), np.diff(np.append(seg_offsets, vals.size)))
    is_best = vals == best[seg_ids]
    # first maximizing position per segment (segments are nonempty)
    first = np.full(n_arms, vals.size, dtype=np.int64)
    pos = np.flatnonzero(is_best)
    np.minimum.at(first, seg_ids[pos], pos)
    return best, owners[first]


def upper_gaps(l: np.ndarray, r: np.ndarray, want_anchors: bool = False):
    """Right and left gap upper bounds for every arm at once.

    Returns (upper_right, upper_left) arrays, plus anchor-owner arrays when
    ``want_anchors`` is set.  Runs in O(K^2) element work with no per-arm
    Python loop, so it is cheap enough to sit inside simulation inner loops.
    Each arm's own endpoint is always included as an anchor, which keeps the
    computation defined even for crossed envelope intervals (a bad-event
    artifact where l > r).
    """
    l = np.asarray(l, dtype=float)
    r = np.asarray(r, dtype=float)
    k = l.size
    idx = np.arange(k)

    # ---- right bounds: anchors are left endpoints inside [l_a, r_a] ----
    order_l = np.argsort(l, kind="stable")
    ls, rs = l[order_l], r[order_l]
    sufmin_r = np.minimum.accumulate(rs[::-1])[::-1]  # min r over sorted-l suffix
    top_r_arm = int(np.argmax(r))
    r_wo_top = r.copy()
    r_wo_top[top_r_arm] = -np.inf
    second_r = r_wo_top.max()
    maxr_excl = np.where(idx == top_r_arm, second_r, r[top_r_arm])

    lo = np.searchsorted(ls, l, side="left")
    hi = np.searchsorted(ls, r, side="right")
    n = np.maximum(hi - lo, 0) + 1  # +1 for the arm's own left endpoint
    offsets = np.concatenate(([0], np.cumsum(n)[:-1]))
    arm_ids = np.repeat(idx, n)
    pos_in_seg = np.arange(int(n.sum())) - np.repeat(offsets, n)
    in_range = pos_in_seg > 0
    src = np.repeat(lo, n) + pos_in_seg - 1
    xs = np.where(in_range, ls[np.minimum(src, k - 1)], l[arm_ids])
    owners = np.where(in_range, order_l[np.minimum(src, k - 1)], arm_ids)
    above = np.searchsorted(ls, xs, side="right")
    has_above = above < k
    vals = np.where(
        has_above,
        sufmin_r[np.minimum(above, k - 1)] - xs,
        maxr_excl[arm_ids] - xs,
    )
    if want_anchors:
        ud_r, anchor_r = _grouped_anchor_max(vals, owners, offsets, k)
    else:
        ud_r = np.maximum.reduceat(vals, offsets)
        anchor_r = None

    # ---- left bounds: anchors are right endpoints inside [l_a, r_a] ----
    order_r = np.argsort(r, kind="stable")
    rs2, ls2 = r[order_r], l[order_r]
    prefmax_l = np.maximum.accumulate(ls2)  # max l over sorted-r prefix
    bot_l_arm = int(np.argmin(l))
    l_wo_bot = l.copy()
    l_wo_bot[bot_l_arm] = np.inf
    second_l = l_wo_bot.min()
    minl_excl = np.where(idx == bot_l_arm, second_l, l[bot_l_arm])

    lo2 = np.searchsorted(rs2, l, side="left")
    hi2 = np.searchsorted(rs2, r, side="right")
    n2 = np.maximum(hi2 - lo2, 0) + 1  # +1 for the arm's own right endpoint
    offsets2 = np.concatenate(([0], np.cumsum(n2)[:-1]))
    arm_ids2 = np.repeat(idx, n2)
    pos2 = np.arange(int(n2.sum())) - np.repeat(offsets2, n2)
    in_range2 = pos2 > 0
    src2 = np.repeat(lo2, n2) + pos2 - 1
    xs2 = np.where(in_range2, rs2[np.minimum(src2, k - 1)], r[arm_ids2])
    owners2 = np.where(in_range2, order_r[np.minimum(src2, k - 1)], arm_ids2)
    below = np.searchsorted(rs2, xs2, side="left")
    has_below = below > 0
    vals2 = np.where(
        has_below,
        xs2 - prefmax_l[np.maximum(below, 1) - 1],
        xs2 - minl_excl[arm_ids2],
    )
    if want_anchors:
        ud_l, anchor_l = _grouped_anchor_max(vals2, owners2, offsets2, k)
    else:
        ud_l = np.maximum.reduceat(vals2, offsets2)
        anchor_l = None

    if want_anchors:
        return ud_r, ud_l, anchor_r, anchor_l
    return ud_r, ud_l


def lower_max_gap(
    l: np.ndarray, r: np.ndarray, empirical_means: np.ndarray
) -> tuple[float, int, tuple[int, int]]:
    """Certified lower bound on the largest gap, with its maximizing split.

    Arms are ordered by descending empirical mean (ties by arm index); for
    each split size k the bound is (min lower endpoint among the top k) minus
    (max upper endpoint among the rest).  Returns (bound, split size, witness
    arm pair); the bound can be negative when no split is separated, and ties
    across splits resolve to the smallest top group.
    """
    l = np.asarray(l, dtype=float)
    r = np.asarray(r, dtype=float)
    means = np.asarray(empirical_means, dtype=float)
    k = l.size
    order = np.lexsort((np.arange(k), -means))
    l_ord, r_ord = l[order], r[order]

    prefmin = np.minimum.accumulate(l_ord)
    sufmax = np.maximum.accumulate(r_ord[::-1])[::-1]
    vals = prefmin[:-1] - sufmax[1:]
    split = int(np.argmax(vals))  # first max -> smallest top group
    bound = float(vals[split])

    # witnesses: argmin of l in the top prefix, argmax of r in the bottom suffix
    top_w = int(order[np.argmin(l_ord[: split + 1])])
    bot_rel = np.argmax(r_ord[split + 1 :])
    bot_w = int(order[split + 1 + bot_rel])
    return bound, split + 1, (top_w, bot_w)


def compute_gap_bounds(
    snapshot: IntervalSnapshot, empirical_means: np.ndarray
) -> GapBounds:
    """Bundle per-arm upper bounds and the global lower bound with witnesses."""
    ud_r, ud_l, anchor_r, anchor_l = upper_gaps(snapshot.l, snapshot.r, want_anchors=True)
    lower, split_size, witness = lower_max_gap(snapshot.l, snapshot.r, empirical_means)
    return GapBounds(
        upper_right=ud_r,
        upper_left=ud_l,
        upper=np.maximum(ud_r, ud_l),
        lower=lower,
        anchor_right=anchor_r,
        anchor_left=anchor_l,
        split_size=split_size,
        lower_witness=witness,
    )


def _endpoint_candidates(l: np.ndarray, r: np.ndarray) -> list[np.ndarray]:
    """Per arm: its own endpoints plus every endpoint inside its interval."""
    endpoints = np.concatenate([l, r])
    cands = []
    for i in range(l.size):
        inside = endpoints[(endpoints >= l[i]) & (endpoints <= r[i])]
        cands.append(np.unique(np.concatenate([inside, [l[i], r[i]]])))
    return cands


def _brute_force_right(a: int, l: np.ndarray, r: np.ndarray) -> float:
    """Maximize mu_b - mu_a over endpoint placements with an empty open gap.

    For each candidate position x of arm ``a`` and y of a neighbor ``b``, the
    configuration is feasible iff every other arm can sit outside (x, y),
    i.e. its interval reaches left of x or right of y.  Optimal placements
    occur at interval endpoints, so scanning the candidate grid is exact.
    """
    k = l.size
    cands = _endpoint_candidates(l, r)
    xs = cands[a]
    best = -math.inf
    for b in range(k):
        if b == a:
            continue
        ys = cands[b]
        rest = np.array([i for i in range(k) if i != a and i != b])
        # feasible[i, xi, yi]: arm i clears the open interval (x, y)
        ok_left = l[rest][:, None] <= xs[None, :]          # (rest, x)
        ok_right = r[rest][:, None] >= ys[None, :]         # (rest, y)
        feasible = np.all(
            ok_left[:, :, None] | ok_right[:, None, :], axis=0
        )  # (x, y)
        if feasible.any():
            gaps = ys[None, :] - xs[:, None]
            best = max(best, float(gaps[feasible].max()))
    return best


def brute_force_upper_gap(a: int, snapshot: IntervalSnapshot) -> tuple[float, float]:
    """Oracle (right, left) gap upper bounds by exhaustive endpoint search.

    Restricted to small arm counts; the left bound reuses the right-gap
    search on the reflected snapshot (negate and swap endpoints).
    """
    if snapshot.n_arms > BRUTE_FORCE_MAX_ARMS:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_ARMS} arms, got {snapshot.n_arms}"
        )
    ud_r = _brute_force_right(a, snapshot.l, snapshot.r)
    ud_l = _brute_force_right(a, -snapshot.r, -snapshot.l)
    return ud_r, ud_l
