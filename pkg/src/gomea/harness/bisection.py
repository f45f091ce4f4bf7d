"""Population sizing by doubling followed by integer binary search."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ..core import EvaluationBudget
from ..schemes import ConfigError, RunRecord, SchemeConfig, run

DEFAULT_RUNS = 50
DEFAULT_MAX_EVALUATIONS = 10 ** 8
DEFAULT_MAX_GENERATIONS = 200
DEFAULT_MAX_POPULATION = 10 ** 5


def derive_seeds(master: int, runs: int = DEFAULT_RUNS) -> list[int]:
    """Fixed split of ``master`` into ``runs`` independent run seeds."""
    state = np.random.SeedSequence(int(master)).generate_state(runs, np.uint64)
    return [int(s) for s in state]


@dataclass
class Caps:
    max_evaluations: Optional[int] = DEFAULT_MAX_EVALUATIONS
    max_generations: Optional[int] = DEFAULT_MAX_GENERATIONS
    max_population: int = DEFAULT_MAX_POPULATION
    max_seconds: Optional[float] = None

    def budget(self) -> EvaluationBudget:
        return EvaluationBudget(
            max_evaluations=self.max_evaluations,
            max_seconds=self.max_seconds,
            max_generations_per_population=self.max_generations,
        )


@dataclass
class SizeTrial:
    """Outcome of running the seed list at one population size.

    Runs stop at the first failure, so ``records`` may be shorter than the
    seed list; ``median_evaluations`` is then taken over the runs that did
    execute.
    """

    size: int
    passed: bool
    records: list = field(default_factory=list)

    @property
    def median_evaluations(self) -> Optional[float]:
        if not self.records:
            return None
        return float(np.median([r.evaluations for r in self.records]))

    def to_dict(self, with_records: bool = False) -> dict:
        out = {
            "size": self.size,
            "passed": self.passed,
            "runs": len(self.records),
            "successes": sum(r.success for r in self.records),
            "median_evaluations": self.median_evaluations,
        }
        if with_records:
            out["records"] = [r.to_dict() for r in self.records]
        return out


@dataclass
class BisectionResult:
    success: bool
    minimal_success_size: Optional[int]
    best_evals_size: Optional[int]
    median_evaluations_at_best: Optional[float]
    trials: dict  # size -> SizeTrial, in testing order
    reason: str = ""

    @property
    def tested_sizes(self) -> list[int]:
        return list(self.trials)

    @property
    def best_records(self) -> list:
        return [] if self.best_evals_size is None else self.trials[self.best_evals_size].records

    def to_dict(self, with_records: bool = True) -> dict:
        return {
            "success": self.success,
            "minimal_success_size": self.minimal_success_size,
            "best_evals_size": self.best_evals_size,
            "median_evaluations_at_best": self.median_evaluations_at_best,
            "reason": self.reason,
            "trials": [t.to_dict() for t in self.trials.values()],
            "records": [r.to_dict() for r in self.best_records] if with_records else [],
        }


def bisect_sizes(trial: Callable[[int], SizeTrial], start: int = 2,
                 max_size: int = DEFAULT_MAX_POPULATION) -> BisectionResult:
    """Generic search for the smallest passing size.

    ``trial(n)`` is called once per distinct size.  Sizes double from
    ``start`` until one passes (or ``max_size`` would be exceeded), then
    the gap between the last failing and the first passing size is halved
    down to a width of one.
    """
    trials: dict[int, SizeTrial] = {}

    def test(n: int) -> bool:
        if n not in trials:
            trials[n] = trial(n)
        return trials[n].passed

    low, high = None, start
    while not test(high):
        low = high
        high *= 2
        if high > max_size:
            return BisectionResult(False, None, None, None, trials,
                                   reason=f"no passing size up to {max_size}")
    if low is not None:
        while high - low > 1:
            mid = (low + high) // 2
            if test(mid):
                high = mid
            else:
                low = mid

    passing = [t for t in trials.values() if t.passed]
    best = min(passing, key=lambda t: (t.median_evaluations, t.size))
    return BisectionResult(True, high, best.size, best.median_evaluations, trials)


def run_size(config: SchemeConfig, instance, size: int, seeds: Sequence[int],
             caps: Caps, on_record: Optional[Callable[[RunRecord], None]] = None) -> SizeTrial:
    cfg = replace(config, population_size=size)
    budget = caps.budget()
    trial = SizeTrial(size, True)
    for seed in seeds:
        record = run(cfg, instance, budget, seed=seed, record_log=False)
        trial.records.append(record)
        if on_record is not None:
            on_record(record)
        if not record.success:
            trial.passed = False
            break
    return trial


def bisect_population_size(config: SchemeConfig, instance, seeds: Sequence[int],
                           caps: Optional[Caps] = None,
                           on_record: Optional[Callable[[RunRecord], None]] = None) -> BisectionResult:
    """Smallest population size that solves ``instance`` on every seed."""
    if config.scheme != "single":
        raise ConfigError("bisection applies to the single-population scheme only")
    if instance.optimum is None:
        raise ConfigError("bisection needs an instance with a known optimum")
    if not seeds:
        raise ValueError("need at least one seed")
    caps = caps or Caps()
    return bisect_sizes(lambda n: run_size(config, instance, n, seeds, caps, on_record),
                        start=2, max_size=caps.max_population)
