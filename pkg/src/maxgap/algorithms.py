"""Adaptive algorithms for largest-gap identification, plus baselines.

All algorithms share the same skeleton: sample some set of arms each round,
maintain anytime confidence intervals (envelope form), convert them into gap
upper bounds and a global lower bound, and stop once the bounds certify the
split.  They differ in which arms they sample:

- ``max_gap_elim`` samples every arm in an active set and eliminates arms
  whose gap upper bound falls below the certified lower bound.
- ``max_gap_ucb`` samples all arms attaining the largest gap upper bound and
  stops when two arms dominate the sample counts.
- ``max_gap_top2_ucb`` samples the arms attaining the two largest distinct
  gap upper bound values and stops when the second value drops below the
  lower bound.
- ``uniform_baseline`` samples round-robin with no stopping rule.
- ``naive_sort_then_bai`` first sorts the arms by separating all intervals,
  then runs a LUCB best-arm race over the adjacent-gap pseudo-arms.

Bound recompute cadence: by default bounds are recomputed every round.
``RunConfig.check_growth > 1`` switches to a geometrically spaced schedule
(sampling is unchanged; eliminations and stopping are only evaluated at
scheduled rounds), which long Monte-Carlo sweeps need to stay tractable.

Runs are deterministic functions of (instance, config, generator state):
identical seeds give identical traces.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .confidence import IntervalTracker
from .env import Instance, sample_block
from .gapbounds import lower_max_gap, upper_gaps

__all__ = [
    "RunConfig",
    "CheckpointRecord",
    "RunTrace",
    "report_clusters",
    "max_gap_elim",
    "max_gap_ucb",
    "max_gap_top2_ucb",
    "uniform_baseline",
    "naive_sort_then_bai",
    "ALGORITHMS",
]


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by all algorithm runs.

    ``ucb_stop_factor`` is the count-dominance factor in the UCB stopping
    test.  ``budget_cap`` is a hard safety horizon on total samples; runs
    that hit it return a best-effort clustering flagged as truncated.
    ``checkpoints`` are total-sample budgets at which the anytime clustering
    is recorded even before stopping.  ``check_growth`` controls the bound
    recompute schedule (1.0 = every round).
    """

    delta: float = 0.1
    ucb_stop_factor: float = 10.0
    budget_cap: int = 10_000_000
    elim_early_stop: bool = False
    checkpoints: tuple[int, ...] = ()
    check_growth: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.ucb_stop_factor <= 0:
            raise ValueError("ucb_stop_factor must be positive")
        if self.check_growth < 1.0:
            raise ValueError("check_growth must be >= 1.0")
        cps = tuple(int(c) for c in self.checkpoints)
        if any(c <= 0 for c in cps) or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be positive and strictly increasing")
        object.__setattr__(self, "checkpoints", cps)


@dataclass(frozen=True)
class CheckpointRecord:
    """Anytime clustering at a sample budget."""

    budget: int
    total_samples: int
    clusters: tuple[tuple[int, ...], tuple[int, ...]]
    counts: np.ndarray


@dataclass
class RunTrace:
    """Full record of one run.

    Per-record arrays cover the rounds at which bounds were recomputed;
    ``sampled`` marks arms drawn in the block ending at that round and
    ``active`` the algorithm's active/top set after the round's update.
    """

    algorithm: str
    n_arms: int
    round_index: np.ndarray
    counts: np.ndarray
    upper_right: np.ndarray
    upper_left: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    env_l: np.ndarray
    env_r: np.ndarray
    sampled: np.ndarray
    active: np.ndarray
    stop_round: int
    total_samples: int
    stopped_by: str  # "rule" | "early_rule" | "budget"
    truncated: bool
    clusters: tuple[tuple[int, ...], tuple[int, ...]]
    checkpoints: tuple[CheckpointRecord, ...]
    final_counts: np.ndarray
    final_means: np.ndarray
    good_event: bool
    phase1_rounds: Optional[int] = None
    degenerate_rounds: int = 0

    def fingerprint(self) -> str:
        """Digest of the full trace; equal inputs must reproduce it exactly."""
        h = hashlib.sha256()
        for a in (
            self.round_index, self.counts, self.upper_right, self.upper_left,
            self.upper, self.lower, self.env_l, self.env_r, self.sampled,
            self.active, self.final_counts, self.final_means,
        ):
            h.update(np.ascontiguousarray(a).tobytes())
            h.update(str(a.dtype).encode())
            h.update(str(a.shape).encode())
        for rec in self.checkpoints:
            h.update(repr((rec.budget, rec.total_samples, rec.clusters)).encode())
            h.update(np.ascontiguousarray(rec.counts).tobytes())
        h.update(
            repr(
                (
                    self.algorithm, self.n_arms, self.stop_round, self.total_samples,
                    self.stopped_by, self.truncated, self.clusters,
                    self.good_event, self.phase1_rounds, self.degenerate_rounds,
                )
            ).encode()
        )
        return h.hexdigest()


def report_clusters(
    empirical_means: np.ndarray,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split the arms at the largest adjacent gap of the empirical means.

    Ties in means break by ascending arm index; ties in the largest gap break
    toward the smaller top cluster.  Every arm must have been sampled.
    """
    means = np.asarray(empirical_means, dtype=float)
    if means.ndim != 1 or means.size < 2:
        raise ValueError("need a 1-d vector of at least 2 empirical means")
    if not np.all(np.isfinite(means)):
        raise ValueError("every arm needs at least one sample before clustering")
    order = np.lexsort((np.arange(means.size), -means))
    s = means[order]
    gaps = s[:-1] - s[1:]
    split = int(np.argmax(gaps))  # first max -> smallest top cluster
    top = tuple(sorted(int(i) for i in order[: split + 1]))
    bottom = tuple(sorted(int(i) for i in order[split + 1 :]))
    return top, bottom


def _next_check(t: int, growth: float) -> int:
    if growth <= 1.0:
        return t + 1
    return max(t + 1, int(t * growth))


class _Run:
    """Shared bookkeeping: sampling blocks, budget cap, checkpoints, records."""

    def __init__(self, instance: Instance, config: RunConfig, rng: np.random.Generator):
        if config.budget_cap < instance.n_arms:
            raise ValueError("budget_cap must allow at least one round over all arms")
        self.instance = instance
        self.config = config
        self.rng = rng
        self.tracker = IntervalTracker(instance.n_arms, instance.sigmas, config.delta)
        self.t = 0
        self.total = 0
        self.truncated = False
        self._ckpts = list(config.checkpoints)
        self._next_ckpt = 0
        self.checkpoint_records: list[CheckpointRecord] = []
        self._rec: dict[str, list] = {
            "round": [], "counts": [], "udr": [], "udl": [], "ud": [],
            "lb": [], "env_l": [], "env_r": [], "sampled": [], "active": [],
        }

    # -- sampling ---------------------------------------------------------

    def advance(
        self, arms: np.ndarray, n_rounds: int, collect: bool = False
    ) -> tuple[int, Optional[np.ndarray]]:
        """Sample ``arms`` for up to ``n_rounds`` rounds.

        Splits internally at checkpoint crossings and at the budget cap.
        Returns (rounds actually run, stacked draws if ``collect``).
        """
        m = arms.size
        done = 0
        chunks: list[np.ndarray] = [] if collect else None
        while done < n_rounds:
            cap_rounds = (self.config.budget_cap - self.total) // m
            if cap_rounds <= 0:
                self.truncated = True
                break
            step = min(n_rounds - done, cap_rounds)
            if self._next_ckpt < len(self._ckpts):
                need = self._ckpts[self._next_ckpt] - self.total
                if need > 0:
                    step = min(step, -(-need // m))
            draws = sample_block(self.instance, arms, step, self.rng)
            self.tracker.add(arms, draws)
            if collect:
                chunks.append(draws)
            self.t += step
            self.total += step * m
            done += step
            while (
                self._next_ckpt < len(self._ckpts)
                and self.total >= self._ckpts[self._next_ckpt]
            ):
                self._record_checkpoint(self._ckpts[self._next_ckpt])
                self._next_ckpt += 1
        out = np.concatenate(chunks, axis=0) if collect and chunks else None
        return done, out

    def _record_checkpoint(self, budget: int) -> None:
        self.checkpoint_records.append(
            CheckpointRecord(
                budget=budget,
                total_samples=self.total,
                clusters=report_clusters(self.tracker.means),
                counts=self.tracker.counts.copy(),
            )
        )

    def flush_checkpoints(self) -> None:
        """Assign the final clustering to checkpoints the run never reached."""
        for budget in self._ckpts[self._next_ckpt :]:
            self._record_checkpoint(budget)
        self._next_ckpt = len(self._ckpts)

    # -- bounds and records -------------------------------------------------

    def compute_bounds(self):
        self.tracker.refresh()
        tr = self.tracker
        udr, udl = upper_gaps(tr.l_env, tr.r_env)
        lb, split_size, _ = lower_max_gap(tr.l_env, tr.r_env, tr.means)
        return udr, udl, np.maximum(udr, udl), lb, split_size

    def record(self, udr, udl, ud, lb, sampled_mask, active_mask) -> None:
        tr = self.tracker
        r = self._rec
        r["round"].append(self.t)
        r["counts"].append(tr.counts.copy())
        r["udr"].append(udr)
        r["udl"].append(udl)
        r["ud"].append(ud)
        r["lb"].append(lb)
        r["env_l"].append(tr.l_env.copy())
        r["env_r"].append(tr.r_env.copy())
        r["sampled"].append(sampled_mask.copy())
        r["active"].append(active_mask.copy())

    def finish(
        self,
        algorithm: str,
        stopped_by: str,
        clusters: tuple[tuple[int, ...], tuple[int, ...]],
        phase1_rounds: Optional[int] = None,
    ) -> RunTrace:
        self.flush_checkpoints()
        k = self.instance.n_arms
        r = self._rec

        def stack(key, dtype=float):
            rows = r[key]
            if not rows:
                return np.empty((0, k), dtype=dtype)
            return np.array(rows, dtype=dtype)

        return RunTrace(
            algorithm=algorithm,
            n_arms=k,
            round_index=np.array(r["round"], dtype=np.int64),
            counts=stack("counts", np.int64),
            upper_right=stack("udr"),
            upper_left=stack("udl"),
            upper=stack("ud"),
            lower=np.array(r["lb"], dtype=float),
            env_l=stack("env_l"),
            env_r=stack("env_r"),
            sampled=stack("sampled", bool),
            active=stack("active", bool),
            stop_round=self.t,
            total_samples=self.total,
            stopped_by=stopped_by,
            truncated=self.truncated,
            clusters=clusters,
            checkpoints=tuple(self.checkpoint_records),
            final_counts=self.tracker.counts.copy(),
            final_means=np.asarray(self.tracker.means, dtype=float),
            good_event=self.tracker.contains_truth(self.instance),
            phase1_rounds=phase1_rounds,
        )


def _early_stop_holds(udr, udl, lb, means, split_size, n_arms) -> bool:
    """Certified-split early stop: every right-gap bound in the top group and
    every left-gap bound in the bottom group sits below the lower bound."""
    if not lb > 0:
        return False
    order = np.lexsort((np.arange(n_arms), -np.asarray(means)))
    top = order[:split_size]
    bottom = order[split_size:]
    return bool(np.all(udr[top] < lb) and np.all(udl[bottom] < lb))


def max_gap_elim(
    instance: Instance, config: RunConfig, rng: np.random.Generator
) -> RunTrace:
    """Eliminate arms whose gap upper bound falls below the certified lower
    bound; stop when only two arms remain (or earlier under the optional
    certified-split rule)."""
    run = _Run(instance, config, rng)
    k = instance.n_arms
    active = np.ones(k, dtype=bool)
    stopped_by = "budget"
    while True:
        target = _next_check(run.t, config.check_growth) - run.t
        arms = np.flatnonzero(active)
        got, _ = run.advance(arms, target)
        udr, udl, ud, lb, split_size = run.compute_bounds()
        if got < target:
            run.record(udr, udl, ud, lb, active, active)
            break
        sampled_mask = active.copy()
        active &= ~(ud < lb)  # strict: ties never eliminate
        run.record(udr, udl, ud, lb, sampled_mask, active)
        if config.elim_early_stop and _early_stop_holds(
            udr, udl, lb, run.tracker.means, split_size, k
        ):
            stopped_by = "early_rule"
            break
        if int(active.sum()) <= 2:
            stopped_by = "rule"
            break
    clusters = report_clusters(run.tracker.means)
    return run.finish("maxgap-elim", stopped_by, clusters)


def max_gap_ucb(
    instance: Instance, config: RunConfig, rng: np.random.Generator
) -> RunTrace:
    """Sample every arm attaining the largest gap upper bound; stop when two
    arms' sample counts dominate the rest by ``ucb_stop_factor``."""
    run = _Run(instance, config, rng)
    k = instance.n_arms
    current = np.ones(k, dtype=bool)
    stopped_by = "budget"
    while True:
        target = _next_check(run.t, config.check_growth) - run.t
        got, _ = run.advance(np.flatnonzero(current), target)
        udr, udl, ud, lb, _ = run.compute_bounds()
        if got < target:
            run.record(udr, udl, ud, lb, current, current)
            break
        sampled_mask = current.copy()
        current = ud == ud.max()  # exact ties: shared witnesses give equal floats
        run.record(udr, udl, ud, lb, sampled_mask, current)
        counts = np.sort(run.tracker.counts)
        top_two = int(counts[-2:].sum())
        if top_two >= config.ucb_stop_factor * (run.total - top_two):
            stopped_by = "rule"
            break
    clusters = report_clusters(run.tracker.means)
    return run.finish("maxgap-ucb", stopped_by, clusters)


def max_gap_top2_ucb(
    instance: Instance, config: RunConfig, rng: np.random.Generator
) -> RunTrace:
    """Sample the arms attaining the two largest distinct gap upper bound
    values; stop when the second value drops below the lower bound.

    When every arm ties at the single largest value there is no runner-up
    value to test: the round is degenerate (counted on the trace), only the
    top set is sampled, and the run continues.
    """
    run = _Run(instance, config, rng)
    k = instance.n_arms
    current = np.ones(k, dtype=bool)
    stopped_by = "budget"
    degenerate_rounds = 0
    while True:
        target = _next_check(run.t, config.check_growth) - run.t
        got, _ = run.advance(np.flatnonzero(current), target)
        udr, udl, ud, lb, _ = run.compute_bounds()
        if got < target:
            run.record(udr, udl, ud, lb, current, current)
            break
        top_set = ud == ud.max()
        rest = ~top_set
        if rest.any():
            second = ud[rest].max()
            second_set = rest & (ud == second)
        else:
            second = -math.inf
            second_set = np.zeros(k, dtype=bool)
            degenerate_rounds += 1
        sampled_mask = current.copy()
        current = top_set | second_set
        run.record(udr, udl, ud, lb, sampled_mask, current)
        if rest.any() and second < lb:
            stopped_by = "rule"
            break
    clusters = report_clusters(run.tracker.means)
    trace = run.finish("maxgap-top2-ucb", stopped_by, clusters)
    trace.degenerate_rounds = degenerate_rounds
    return trace


def uniform_baseline(
    instance: Instance, config: RunConfig, rng: np.random.Generator
) -> RunTrace:
    """Round-robin sampling up to the budget cap; no adaptive stopping.

    No bounds are maintained, so the trace carries checkpoint clusterings
    only; the final good-event flag reflects the end-of-run raw intervals.
    """
    run = _Run(instance, config, rng)
    arms = np.arange(instance.n_arms)
    rounds = config.budget_cap // instance.n_arms
    run.advance(arms, rounds)
    run.truncated = False  # exhausting the budget is this baseline's normal end
    run.tracker.refresh()
    clusters = report_clusters(run.tracker.means)
    return run.finish("uniform", "budget", clusters)


def naive_sort_then_bai(
    instance: Instance, config: RunConfig, rng: np.random.Generator
) -> RunTrace:
    """Sort-then-search baseline.

    Phase 1 samples all arms until every pair of confidence intervals is
    disjoint, certifying the order of the means.  Phase 2 treats the K-1
    adjacent gaps as pseudo-arms (a gap sample is the difference of fresh
    draws from its two endpoint arms, hence twice the variance) and runs a
    LUCB race: each round samples the empirical-best gap and the highest-UCB
    challenger, stopping when the leader's lower bound clears every other
    gap's upper bound.
    """
    run = _Run(instance, config, rng)
    k = instance.n_arms
    all_arms = np.arange(k)
    idx = np.arange(k)

    # ---- phase 1: separate all intervals ----
    order = None
    while True:
        target = _next_check(run.t, config.check_growth) - run.t
        got, _ = run.advance(all_arms, target)
        udr, udl, ud, lb, _ = run.compute_bounds()
        ones = np.ones(k, dtype=bool)
        run.record(udr, udl, ud, lb, ones, ones)
        if got < target:
            return run.finish(
                "naive", "budget", report_clusters(run.tracker.means), run.t
            )
        tr = run.tracker
        by_l = np.argsort(tr.l_env, kind="stable")
        if np.all(tr.r_env[by_l][:-1] < tr.l_env[by_l][1:]):
            order = np.lexsort((idx, -tr.means))
            break
    phase1_rounds = run.t

    # ---- phase 2: LUCB over adjacent-gap pseudo-arms ----
    hi, lo = order[:-1], order[1:]
    n_gaps = k - 1
    gap_sigma = np.sqrt(instance.sigmas[hi] ** 2 + instance.sigmas[lo] ** 2)
    gap_counts = np.zeros(n_gaps, dtype=np.int64)
    gap_sums = np.zeros(n_gaps, dtype=float)

    def gap_advance(gaps: np.ndarray, n_rounds: int) -> int:
        arms = np.empty(2 * gaps.size, dtype=int)
        arms[0::2] = hi[gaps]
        arms[1::2] = lo[gaps]
        done, draws = run.advance(arms, n_rounds, collect=True)
        if done:
            diffs = draws[:, 0::2] - draws[:, 1::2]
            np.add.at(gap_counts, gaps, done)
            np.add.at(gap_sums, gaps, diffs.sum(axis=0))
        return done

    got = gap_advance(np.arange(n_gaps), 1)  # one sample of every gap
    udr, udl, ud, lb, _ = run.compute_bounds()
    ones = np.ones(k, dtype=bool)
    run.record(udr, udl, ud, lb, ones, ones)
    winner = None
    if got == 1:
        while True:
            s = gap_counts.astype(float)
            ghat = gap_sums / s
            crad = gap_sigma * np.sqrt(2.0 * np.log(4.0 * k * s * s / config.delta) / s)
            leader = int(np.argmax(ghat))
            others = idx[:-1] != leader
            best_other = float((ghat + crad)[others].max())
            if ghat[leader] - crad[leader] > best_other:
                winner = leader
                break
            challenger = int(np.flatnonzero(others)[np.argmax((ghat + crad)[others])])
            target = _next_check(run.t, config.check_growth) - run.t
            got = gap_advance(np.array([leader, challenger]), target)
            udr, udl, ud, lb, _ = run.compute_bounds()
            pair = np.zeros(k, dtype=bool)
            pair[[hi[leader], lo[leader], hi[challenger], lo[challenger]]] = True
            run.record(udr, udl, ud, lb, pair, pair)
            if got < target:
                break

    if winner is None:
        return run.finish(
            "naive", "budget", report_clusters(run.tracker.means), phase1_rounds
        )
    top = tuple(sorted(int(i) for i in order[: winner + 1]))
    bottom = tuple(sorted(int(i) for i in order[winner + 1 :]))
    return run.finish("naive", "rule", (top, bottom), phase1_rounds)


ALGORITHMS: dict[str, Callable[[Instance, RunConfig, np.random.Generator], RunTrace]] = {
    "maxgap-elim": max_gap_elim,
    "maxgap-ucb": max_gap_ucb,
    "maxgap-top2-ucb": max_gap_top2_ucb,
    "uniform": uniform_baseline,
    "naive": naive_sort_then_bai,
}
