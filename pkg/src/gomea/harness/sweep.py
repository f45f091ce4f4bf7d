"""Scalability sweeps: one summary row per problem size."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO

from ..problems import attach_optimum, generate_instance
from ..schemes import RunRecord, SchemeConfig, run
from .bisection import Caps, bisect_population_size
from .stats import summarize

ROW_FIELDS = (
    "config", "problem", "length", "population_size", "runs", "successes", "failed",
    "evals_median", "evals_low", "evals_high",
    "time_median", "time_low", "time_high", "reason",
)


def certified_instance(kind: str, length: int, seed: int = 0):
    """Generate an instance and make sure it carries a trustworthy optimum."""
    instance = generate_instance(kind, length, seed)
    if instance.optimum is not None:
        return instance
    if kind == "nk":
        return attach_optimum(instance, "nk_dp")
    if length <= 30:
        return attach_optimum(instance, "brute_force")
    return instance


def summary_row(label: str, kind: str, length: int, records: Sequence[RunRecord],
                population_size: Optional[int] = None, reason: str = "") -> dict:
    evals = summarize([r.evaluations for r in records])
    times = summarize([r.wall_time for r in records])
    successes = sum(r.success for r in records)
    return {
        "config": label,
        "problem": kind,
        "length": length,
        "population_size": population_size,
        "runs": len(records),
        "successes": successes,
        "failed": bool(reason) or successes < len(records) or not records,
        "evals_median": evals["median"],
        "evals_low": evals["low"],
        "evals_high": evals["high"],
        "time_median": times["median"],
        "time_low": times["low"],
        "time_high": times["high"],
        "reason": reason,
    }


@dataclass
class SweepSummary:
    rows: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=ROW_FIELDS)
            writer.writeheader()
            writer.writerows(self.rows)


def scalability_sweep(config: SchemeConfig, kind: str, sizes: Sequence[int], seeds: Sequence[int],
                      caps: Optional[Caps] = None, label: str = "custom", instance_seed: int = 0,
                      out: Optional[TextIO] = None,
                      on_row: Optional[Callable[[dict], None]] = None) -> SweepSummary:
    """Bisection (single population) or direct seeded runs (parameterless) per size.

    Rows are written to ``out`` as JSON lines as soon as each size finishes.
    A size that cannot be built or solved yields a failed row and the sweep
    moves on.
    """
    caps = caps or Caps()
    summary = SweepSummary()
    for length in sizes:
        row = _sweep_one(config, kind, int(length), seeds, caps, label, instance_seed, summary)
        summary.rows.append(row)
        if out is not None:
            out.write(json.dumps(row) + "\n")
            out.flush()
        if on_row is not None:
            on_row(row)
    return summary


def _sweep_one(config, kind, length, seeds, caps, label, instance_seed, summary) -> dict:
    try:
        instance = certified_instance(kind, length, instance_seed)
    except ValueError as exc:
        return summary_row(label, kind, length, [], reason=f"invalid instance: {exc}")
    if instance.optimum is None:
        return summary_row(label, kind, length, [], reason="optimum unknown")

    if config.scheme == "single":
        result = bisect_population_size(config, instance, seeds, caps)
        if not result.success:
            tried = [r for t in result.trials.values() for r in t.records]
            summary.records.extend(tried)
            return summary_row(label, kind, length, tried, reason=result.reason)
        records = result.best_records
        summary.records.extend(records)
        return summary_row(label, kind, length, records, result.best_evals_size)

    budget = caps.budget()
    records = [run(config, instance, budget, seed=s, record_log=False) for s in seeds]
    summary.records.extend(records)
    return summary_row(label, kind, length, records)
