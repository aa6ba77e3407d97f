"""Experiment harness and command line interface.

Subcommands:

- ``run``: seeded trial sweeps across algorithms; writes a CSV of per-trial
  rows (anytime error at each checkpoint, stop-time stats) with aggregate
  error-rate rows appended.
- ``profile``: one UCB run; writes per-arm sample counts at each checkpoint
  in long form, for allocation-profile plots.
- ``verify-bounds``: random interval snapshots; compares the fast gap upper
  bounds against the brute-force oracle and fails on any discrepancy.
- ``hardness``: prints the per-arm hardness table and predicted complexity
  sums for an instance.

Configuration is a flat JSON file; the few shared flags override it.  All
outputs are deterministic functions of (config, seed): CSV with a header row,
comma separators, ``.`` decimal point, LF line endings, full-precision
(round-trippable) floats.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .algorithms import ALGORITHMS, RunConfig
from .env import (
    Instance,
    build_lower_bound_instance,
    build_one_gap_instance,
    build_two_gap_instance,
    load_means_file,
)
from .gapbounds import IntervalSnapshot, brute_force_upper_gap, upper_gaps
from .hardness import HardnessReport, hardness_report

__all__ = [
    "ExperimentConfig",
    "build_instance",
    "log_checkpoints",
    "run_experiment",
    "allocation_profile",
    "verify_bounds",
    "write_hardness_report",
    "main",
]

BUILTIN_INSTANCES = ("two-gap", "one-gap", "lower-bound")

RESULT_COLUMNS = (
    "kind", "algorithm", "trial", "seed", "budget", "total_samples",
    "error", "stopped_by", "truncated", "error_rate", "error_std", "n_trials",
)

PROFILE_COLUMNS = ("algorithm", "seed", "budget", "arm", "samples")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; JSON-loadable, flags may override."""

    instance: str = "two-gap"
    instance_params: dict = field(default_factory=dict)
    sigma: float = 1.0  # noise scale for means files
    algorithms: tuple[str, ...] = ("uniform", "maxgap-ucb")
    delta: float = 0.1
    trials: int = 1
    seed: int = 0
    checkpoints: tuple[int, ...] = ()
    budget_cap: int = 10_000_000
    ucb_stop_factor: float = 10.0
    elim_early_stop: bool = False
    check_growth: float = 1.0
    alpha: float = 1.0
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError(
                    f"unknown algorithm {name!r}; choices: {sorted(ALGORITHMS)}"
                )
        cps = tuple(int(c) for c in self.checkpoints)
        if any(c <= 0 for c in cps) or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be positive and strictly increasing")
        object.__setattr__(self, "checkpoints", cps)
        object.__setattr__(self, "algorithms", tuple(self.algorithms))

    def run_config(self) -> RunConfig:
        budget_cap = self.budget_cap
        if self.checkpoints:
            budget_cap = min(budget_cap, max(self.checkpoints))
        return RunConfig(
            delta=self.delta,
            ucb_stop_factor=self.ucb_stop_factor,
            budget_cap=budget_cap,
            elim_early_stop=self.elim_early_stop,
            checkpoints=self.checkpoints,
            check_growth=self.check_growth,
        )


def log_checkpoints(lo: int, hi: int, count: int = 20) -> tuple[int, ...]:
    """Log-spaced integer sample budgets, deduplicated and increasing."""
    if not (0 < lo < hi) or count < 2:
        raise ValueError("need 0 < lo < hi and count >= 2")
    grid = np.unique(np.rint(np.geomspace(lo, hi, count)).astype(int))
    return tuple(int(b) for b in grid)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    if "checkpoint_range" in raw:
        lo, hi = raw.pop("checkpoint_range")
        count = raw.pop("checkpoint_count", 20)
        raw["checkpoints"] = list(log_checkpoints(int(lo), int(hi), int(count)))
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    return ExperimentConfig(**raw)


def build_instance(
    name_or_path: str, params: Optional[dict] = None, sigma: float = 1.0
) -> Instance:
    """Resolve a builtin instance name or a means-file path."""
    params = dict(params or {})
    if name_or_path == "two-gap":
        return build_two_gap_instance()
    if name_or_path == "one-gap":
        return build_one_gap_instance(
            n_arms=int(params.pop("n_arms", 24)),
            delta_min=float(params.pop("delta_min", 0.2)),
            delta_max=float(params.pop("delta_max", 1.0)),
        )
    if name_or_path == "lower-bound":
        return build_lower_bound_instance(
            nu=float(params.pop("nu", 1.0)),
            epsilon=float(params.pop("epsilon", 0.1)),
        )
    return load_means_file(name_or_path, sigma=sigma)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col)) for col in columns) + "\n")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed + trial))


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Run the sweep and return result rows (also written to config.out).

    With checkpoints set, runs are capped at the largest checkpoint and every
    checkpoint yields an anytime row; a stop row is added when the stopping
    rule fired within the budget.  Without checkpoints each run goes to its
    stopping rule (or the budget cap) and yields one stop row.  Aggregate
    error-rate rows (mean and standard deviation of the 0/1 error flags,
    truncated runs excluded) are appended per algorithm and budget.
    """
    instance = build_instance(config.instance, config.instance_params, config.sigma)
    truth = instance.top_cluster
    run_cfg = config.run_config()
    rows: list[dict] = []
    flags: dict[tuple[str, Optional[int]], list[int]] = {}
    stop_totals: dict[str, list[int]] = {}

    for name in config.algorithms:
        algorithm = ALGORITHMS[name]
        for trial in range(config.trials):
            trace = algorithm(instance, run_cfg, _trial_rng(config.seed, trial))
            base = {"algorithm": name, "trial": trial, "seed": config.seed + trial}
            for rec in trace.checkpoints:
                err = int(rec.clusters[0] != truth)
                rows.append(
                    base
                    | {
                        "kind": "anytime",
                        "budget": rec.budget,
                        "total_samples": rec.total_samples,
                        "error": err,
                    }
                )
                flags.setdefault((name, rec.budget), []).append(err)
            stopped = trace.stopped_by in ("rule", "early_rule", "degenerate")
            if stopped or not config.checkpoints:
                err = int(trace.clusters[0] != truth)
                rows.append(
                    base
                    | {
                        "kind": "stop",
                        "budget": trace.total_samples,
                        "total_samples": trace.total_samples,
                        "error": err,
                        "stopped_by": trace.stopped_by,
                        "truncated": trace.truncated,
                    }
                )
                if not trace.truncated:
                    flags.setdefault((name, None), []).append(err)
                    stop_totals.setdefault(name, []).append(trace.total_samples)

    for (name, budget), errs in flags.items():
        arr = np.array(errs, dtype=float)
        row = {
            "kind": "aggregate",
            "algorithm": name,
            "budget": budget,
            "error_rate": float(arr.mean()),
            "error_std": float(arr.std()),
            "n_trials": arr.size,
        }
        if budget is None and name in stop_totals:
            row["total_samples"] = float(np.mean(stop_totals[name]))
        rows.append(row)

    kind_order = {"anytime": 0, "stop": 1, "aggregate": 2}
    rows.sort(
        key=lambda r: (
            kind_order[r["kind"]],
            r["algorithm"],
            r.get("budget") if r.get("budget") is not None else -1,
            r.get("trial", -1),
        )
    )
    if config.out:
        _write_csv(config.out, RESULT_COLUMNS, rows)
    return rows


def allocation_profile(config: ExperimentConfig) -> list[dict]:
    """One UCB run; per-arm sample counts at each checkpoint, long form."""
    if not config.checkpoints:
        raise ValueError("profile needs checkpoints (or checkpoint_range) in the config")
    instance = build_instance(config.instance, config.instance_params, config.sigma)
    trace = ALGORITHMS["maxgap-ucb"](
        instance, config.run_config(), _trial_rng(config.seed, 0)
    )
    rows = [
        {
            "algorithm": "maxgap-ucb",
            "seed": config.seed,
            "budget": rec.budget,
            "arm": arm,
            "samples": int(rec.counts[arm]),
        }
        for rec in trace.checkpoints
        for arm in range(instance.n_arms)
    ]
    if config.out:
        _write_csv(config.out, PROFILE_COLUMNS, rows)
    return rows


def _random_snapshot(rng: np.random.Generator, n_arms: int, pattern: int):
    """Snapshot generator cycling through stress patterns."""
    which = pattern % 6
    if which == 0:  # generic
        mid = rng.uniform(-1.0, 1.0, n_arms)
        rad = rng.uniform(0.01, 0.6, n_arms)
    elif which == 1:  # heavy overlap
        mid = rng.uniform(-0.2, 0.2, n_arms)
        rad = rng.uniform(0.5, 1.5, n_arms)
    elif which == 2:  # nearly resolved
        mid = rng.uniform(-1.0, 1.0, n_arms)
        rad = rng.uniform(0.0, 0.05, n_arms)
    elif which == 3:  # degenerate points
        mid = rng.uniform(-1.0, 1.0, n_arms)
        rad = np.zeros(n_arms)
    elif which == 4:  # identical intervals
        a, b = np.sort(rng.uniform(-1.0, 1.0, 2))
        mid = np.full(n_arms, (a + b) / 2.0)
        rad = np.full(n_arms, (b - a) / 2.0)
    else:  # nested intervals, shared center
        mid = np.full(n_arms, rng.uniform(-0.5, 0.5))
        rad = np.sort(rng.uniform(0.05, 1.0, n_arms))
    return mid - rad, mid + rad


def verify_bounds(n_arms: int, n_snapshots: int, seed: int) -> dict:
    """Compare fast gap upper bounds with the brute-force oracle.

    Returns a report with the max absolute discrepancy over all snapshots,
    arms, and sides, plus the worst snapshot for diagnosis.
    """
    if not 3 <= n_arms <= 8:
        raise ValueError(f"verify-bounds supports 3..8 arms, got {n_arms}")
    if n_snapshots < 1:
        raise ValueError("need at least one snapshot")
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = {"discrepancy": -1.0}
    for i in range(n_snapshots):
        l, r = _random_snapshot(rng, n_arms, i)
        snap = IntervalSnapshot(l=l, r=r)
        fast_r, fast_l = upper_gaps(l, r)
        for a in range(n_arms):
            oracle_r, oracle_l = brute_force_upper_gap(a, snap)
            for side, fast, oracle in (
                ("right", float(fast_r[a]), oracle_r),
                ("left", float(fast_l[a]), oracle_l),
            ):
                d = abs(fast - oracle)
                if d > worst["discrepancy"]:
                    worst = {
                        "discrepancy": d,
                        "snapshot": i,
                        "arm": a,
                        "side": side,
                        "fast": fast,
                        "oracle": oracle,
                        "l": l.tolist(),
                        "r": r.tolist(),
                    }
    return {
        "n_arms": n_arms,
        "n_snapshots": n_snapshots,
        "seed": seed,
        "max_discrepancy": worst["discrepancy"],
        "worst": worst,
    }


def _fmt_inf(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.4f}"


def write_hardness_report(
    instance: Instance, report: HardnessReport, out=None
) -> None:
    """Human-readable hardness table plus the predicted complexity sums."""
    out = out if out is not None else sys.stdout
    cols = ("arm", "mean", "gamma_r", "gamma_l", "gamma", "rho_r", "rho_l", "rho", "naive")
    out.write(("{:>5} {:>10} " + " ".join(["{:>9}"] * 7)).format(*cols) + "\n")
    for a in range(instance.n_arms):
        out.write(
            "{:>5} {:>10.4f} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}\n".format(
                a + 1,
                instance.means[a],
                _fmt_inf(report.gamma_right[a]),
                _fmt_inf(report.gamma_left[a]),
                _fmt_inf(report.gamma[a]),
                _fmt_inf(report.rho_right[a]),
                _fmt_inf(report.rho_left[a]),
                _fmt_inf(report.rho[a]),
                _fmt_inf(report.naive_gamma[a]),
            )
        )
    out.write(
        f"H_main={report.h_main!r} H_elim={report.h_elim!r} H_ucb={report.h_ucb!r} "
        f"(delta={report.delta!r}, alpha={report.alpha!r})\n"
    )


def _hardness_csv_rows(instance: Instance, report: HardnessReport) -> list[dict]:
    rows = []
    for a in range(instance.n_arms):
        rows.append(
            {
                "arm": a + 1,
                "mean": float(instance.means[a]),
                "gamma_r": float(report.gamma_right[a]),
                "gamma_l": float(report.gamma_left[a]),
                "gamma": float(report.gamma[a]),
                "rho_r": float(report.rho_right[a]),
                "rho_l": float(report.rho_left[a]),
                "rho": float(report.rho[a]),
                "naive_gamma": float(report.naive_gamma[a]),
                "h_main": float(report.h_main),
                "h_elim": float(report.h_elim),
                "h_ucb": float(report.h_ucb),
            }
        )
    return rows


HARDNESS_COLUMNS = (
    "arm", "mean", "gamma_r", "gamma_l", "gamma", "rho_r", "rho_l", "rho",
    "naive_gamma", "h_main", "h_elim", "h_ucb",
)


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    updates = {}
    for name in ("seed", "trials", "delta", "out", "sigma"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "instance", None) is not None:
        updates["instance"] = args.instance
        updates["instance_params"] = {}
    return replace(config, **updates) if updates else config


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    return _apply_overrides(config, args)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--trials", type=int, help="number of seeded trials")
    p.add_argument("--delta", type=float, help="confidence parameter in (0, 1)")
    p.add_argument("--instance", help="builtin instance name or means-file path")
    p.add_argument("--sigma", type=float, help="noise scale for means files")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="maxgap", description="Largest-gap bandit simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="seeded experiment sweep")
    _add_common_flags(p_run)

    p_prof = sub.add_parser("profile", help="per-arm allocation profile of one UCB run")
    _add_common_flags(p_prof)

    p_ver = sub.add_parser("verify-bounds", help="gap bound oracle cross-check")
    p_ver.add_argument("--arms", type=int, default=4)
    p_ver.add_argument("--snapshots", type=int, default=1000)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", help="write the report as JSON")

    p_hard = sub.add_parser("hardness", help="hardness parameters of an instance")
    _add_common_flags(p_hard)
    p_hard.add_argument("--alpha", type=float, help="calibration constant")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            config = _config_from_args(args)
            rows = run_experiment(config)
            if not config.out:
                _write_stdout_csv(RESULT_COLUMNS, rows)
        elif args.command == "profile":
            config = _config_from_args(args)
            rows = allocation_profile(config)
            if not config.out:
                _write_stdout_csv(PROFILE_COLUMNS, rows)
        elif args.command == "verify-bounds":
            report = verify_bounds(args.arms, args.snapshots, args.seed)
            text = json.dumps(report, indent=2, sort_keys=True)
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text + "\n")
            print(
                f"verify-bounds: arms={args.arms} snapshots={args.snapshots} "
                f"max_discrepancy={report['max_discrepancy']!r}"
            )
            if report["max_discrepancy"] > 1e-12:
                sys.stderr.write("counterexample:\n" + text + "\n")
                return 1
        elif args.command == "hardness":
            config = _config_from_args(args)
            if getattr(args, "alpha", None) is not None:
                config = replace(config, alpha=args.alpha)
            instance = build_instance(
                config.instance, config.instance_params, config.sigma
            )
            report = hardness_report(instance, config.delta, config.alpha)
            write_hardness_report(instance, report)
            if config.out:
                _write_csv(config.out, HARDNESS_COLUMNS, _hardness_csv_rows(instance, report))
    except (ValueError, OSError) as exc:
        parser.exit(2, f"maxgap: error: {exc}\n")
    return 0


def _write_stdout_csv(columns: Sequence[str], rows: Sequence[dict]) -> None:
    sys.stdout.write(",".join(columns) + "\n")
    for row in rows:
        sys.stdout.write(",".join(_fmt(row.get(col)) for col in columns) + "\n")


if __name__ == "__main__":
    sys.exit(main())
