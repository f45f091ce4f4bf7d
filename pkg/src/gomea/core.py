"""Shared domain types: solutions, budgets, and the per-run evaluator.

All fitness values are maximized.  A run owns exactly one
``numpy.random.Generator`` and one :class:`Evaluator`; every stochastic
choice and every fitness call goes through them so that a run is a pure
function of ``(seed, config, instance)``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

RandomSource = np.random.Generator


def make_rng(seed: int) -> RandomSource:
    return np.random.Generator(np.random.PCG64(int(seed)))


class RunTerminated(Exception):
    """Raised from inside an evaluation to unwind a run."""


class BudgetExhausted(RunTerminated):
    pass


class OptimumReached(RunTerminated):
    pass


@dataclass
class Solution:
    genotype: np.ndarray
    fitness: Optional[float] = None
    nis: int = 0

    def copy(self) -> "Solution":
        return Solution(self.genotype.copy(), self.fitness, self.nis)

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None

    def key(self) -> bytes:
        return self.genotype.tobytes()

    def __repr__(self) -> str:
        bits = "".join(map(str, self.genotype.tolist()))
        return f"Solution({bits}, fitness={self.fitness}, nis={self.nis})"


Population = list  # list[Solution]


@dataclass
class EvaluationBudget:
    """Limits shared by every population of a run.

    ``None`` means unlimited.  ``max_generations_per_population`` is read by
    the population schemes, the other two are enforced by :meth:`charge`.
    """

    max_evaluations: Optional[int] = None
    max_seconds: Optional[float] = None
    max_generations_per_population: Optional[int] = None
    evaluations_used: int = 0
    _started: float = field(default_factory=time.monotonic, repr=False)

    def start(self) -> None:
        self._started = time.monotonic()
        self.evaluations_used = 0

    def elapsed(self) -> float:
        return time.monotonic() - self._started

    def exhausted(self) -> bool:
        if self.max_evaluations is not None and self.evaluations_used >= self.max_evaluations:
            return True
        if self.max_seconds is not None and self.elapsed() >= self.max_seconds:
            return True
        return False

    def charge(self) -> None:
        """Account for one evaluation, or raise if none is left."""
        if self.exhausted():
            raise BudgetExhausted(self.evaluations_used)
        self.evaluations_used += 1


class Evaluator:
    """Evaluation accounting plus the run-wide elitist slot."""

    def __init__(self, problem, budget: Optional[EvaluationBudget] = None,
                 stop_on_optimum: bool = True, record_trace: bool = False):
        self.problem = problem
        self._length = problem.length
        self._evaluate = problem.evaluate
        self.budget = budget if budget is not None else EvaluationBudget()
        self.stop_on_optimum = stop_on_optimum
        self.elitist: Optional[Solution] = None
        self.evaluations_at_optimum: Optional[int] = None
        self.trace: Optional[list] = [] if record_trace else None
        optimum = getattr(problem, "optimum", None)
        self._target = None if optimum is None else optimum - 1e-9 * max(1.0, abs(optimum))

    @property
    def evaluations(self) -> int:
        return self.budget.evaluations_used

    @property
    def optimum_found(self) -> bool:
        return self.evaluations_at_optimum is not None

    def elitist_fitness(self) -> float:
        return -math.inf if self.elitist is None else self.elitist.fitness

    def is_elitist(self, genotype: np.ndarray) -> bool:
        return self.elitist is not None and genotype.tobytes() == self.elitist.genotype.tobytes()

    def evaluate_and_update_elitist(self, solution: Solution) -> float:
        genotype = solution.genotype
        if len(genotype) != self._length:
            raise ValueError(f"genotype length {len(genotype)} != problem length {self._length}")
        self.budget.charge()
        f = float(self._evaluate(genotype))
        solution.fitness = f
        if self.elitist is None or f > self.elitist.fitness:
            self.elitist = solution.copy()
            if self.trace is not None:
                self.trace.append((self.evaluations, f))
            if self._target is not None and f >= self._target and self.evaluations_at_optimum is None:
                self.evaluations_at_optimum = self.evaluations
                if self.stop_on_optimum:
                    raise OptimumReached(self.evaluations)
        return f


def create_random_solution(length: int, rng: RandomSource) -> Solution:
    if length < 1:
        raise ValueError("length must be >= 1")
    return Solution(rng.integers(0, 2, size=length, dtype=np.uint8))


def population_converged(pop: Sequence[Solution]) -> bool:
    if len(pop) <= 1:
        return True
    first = pop[0].genotype
    return all(np.array_equal(first, s.genotype) for s in pop[1:])


def average_fitness(pop: Sequence[Solution]) -> float:
    return float(np.mean([s.fitness for s in pop]))


def genotype_matrix(pop: Sequence[Solution]) -> np.ndarray:
    return np.stack([s.genotype for s in pop])
