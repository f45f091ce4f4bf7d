"""Population management: single population, IMS, P3 and P3-MI."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (
    EvaluationBudget, Evaluator, RandomSource, RunTerminated, Solution,
    average_fitness, create_random_solution, genotype_matrix, make_rng,
    population_converged,
)
from .linkage import (
    MEASURES, ORDERINGS, build_linkage_tree, build_similarity_matrix,
    learn_dependencies,
)
from .localsearch import ehc, sihc
from .variation import MixingContext, VariationFlags, mix

SCHEMES = ("single", "ims", "p3", "p3mi")
HILL_CLIMBERS = ("off", "sihc", "ehc")
IMS_SUBGENERATIONS = 4
IMS_FIRST_SIZE = 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str = "single"
    population_size: Optional[int] = None
    hc: str = "sihc"
    tournament: bool = False
    measure: str = "nmi"
    filtered: bool = True
    ordering: str = "ascending"
    use_fi: bool = True
    use_eds: bool = True
    conditional: bool = False
    lam: float = 0.8

    def validate(self) -> "SchemeConfig":
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.scheme == "single":
            if self.population_size is None or self.population_size < 2:
                raise ConfigError("single-population scheme needs population_size >= 2")
        elif self.population_size is not None:
            raise ConfigError(f"{self.scheme} sizes its populations itself; drop population_size")
        if self.hc not in HILL_CLIMBERS:
            raise ConfigError(f"hc must be one of {HILL_CLIMBERS}")
        if self.measure not in MEASURES:
            raise ConfigError(f"measure must be one of {MEASURES}")
        if (self.measure, self.filtered) not in (("mi", False), ("nmi", True)):
            raise ConfigError("linkage tree must be either unfiltered+mi or filtered+nmi")
        if self.ordering not in ORDERINGS:
            raise ConfigError(f"ordering must be one of {ORDERINGS}")
        if self.conditional and not 0.0 < self.lam <= 1.0:
            raise ConfigError("lambda must lie in (0, 1]")
        return self

    @property
    def flags(self) -> VariationFlags:
        return VariationFlags(self.use_eds, self.use_fi, self.conditional)


PRESETS = {
    "gomea-best": SchemeConfig(
        scheme="single", hc="sihc", tournament=True, measure="nmi", filtered=True,
        ordering="ascending", use_fi=True, use_eds=True),
    "cgomea-best": SchemeConfig(
        scheme="single", hc="sihc", tournament=True, measure="nmi", filtered=True,
        ordering="ascending", use_fi=True, use_eds=True, conditional=True, lam=0.8),
    "gomea-p3-best": SchemeConfig(
        scheme="p3", hc="sihc", tournament=False, measure="nmi", filtered=True,
        ordering="random", use_fi=False, use_eds=True),
    "cgomea-p3-best": SchemeConfig(
        scheme="p3", hc="sihc", tournament=False, measure="nmi", filtered=True,
        ordering="random", use_fi=False, use_eds=True, conditional=True, lam=0.8),
}


@dataclass
class RunRecord:
    seed: int
    config: dict
    problem: str
    length: int
    success: bool
    evaluations: int
    evaluations_used: int
    best_fitness: Optional[float]
    generations: int
    wall_time: float = field(default=0.0, compare=False)
    log: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


class _Run:
    """Mutable state of one optimisation run."""

    def __init__(self, config: SchemeConfig, evaluator: Evaluator, rng: RandomSource):
        self.config = config
        self.evaluator = evaluator
        self.rng = rng
        self.length = evaluator.problem.length
        self.generations = 0
        self.log: list = []

    def new_solution(self) -> Solution:
        s = create_random_solution(self.length, self.rng)
        self.evaluator.evaluate_and_update_elitist(s)
        if self.config.hc == "sihc":
            s, _ = sihc(s, self.evaluator, self.rng)
        elif self.config.hc == "ehc":
            s = ehc(s, self.evaluator, self.rng)
        return s

    def create_population(self, n: int) -> list:
        return [self.new_solution() for _ in range(n)]

    def learn_model(self, pop: list):
        cfg = self.config
        X = genotype_matrix(pop)
        if cfg.tournament:
            X = X[tournament_winners(np.array([s.fitness for s in pop]), self.rng)]
        sim = build_similarity_matrix(X, cfg.measure)
        model = build_linkage_tree(sim, cfg.filtered, self.rng).without_root(self.length)
        if cfg.conditional:
            model = learn_dependencies(model, sim, cfg.lam)
        return model

    def mixing_pass(self, parents: list, donors: list) -> list:
        model = self.learn_model(donors)
        if not model.elements:
            return [p.copy() for p in parents]
        ctx = MixingContext(donors, model, self.evaluator, self.config.ordering)
        flags = self.config.flags
        return [mix(p, ctx, flags, self.rng) for p in parents]


def tournament_winners(fitness: np.ndarray, rng: RandomSource) -> np.ndarray:
    """Winners of ``n`` size-2 tournaments drawn with replacement; ties by coin flip."""
    n = len(fitness)
    pairs = rng.integers(n, size=(n, 2))
    coin = rng.random(n) < 0.5
    fa, fb = fitness[pairs[:, 0]], fitness[pairs[:, 1]]
    pick_b = (fb > fa) | ((fb == fa) & coin)
    return np.where(pick_b, pairs[:, 1], pairs[:, 0])


def single_population_generation(pop: list, run: _Run) -> list:
    """Learn a model on (a tournament sample of) ``pop`` and mix every member."""
    run.generations += 1
    return run.mixing_pass(pop, pop)


def _single(run: _Run, budget: EvaluationBudget) -> None:
    pop = run.create_population(run.config.population_size)
    cap = budget.max_generations_per_population
    gens = 0
    while not population_converged(pop) and (cap is None or gens < cap):
        pop = single_population_generation(pop, run)
        gens += 1


@dataclass
class _ImsPopulation:
    index: int
    members: list
    generations: int = 0
    terminated: bool = False


def _ims_should_stop(pops: list, i: int, cap: Optional[int]) -> bool:
    p = pops[i]
    if population_converged(p.members):
        return True
    if cap is not None and p.generations >= cap:
        return True
    mine = average_fitness(p.members)
    return any(average_fitness(q.members) > mine for q in pops[i + 1:])


def _ims(run: _Run, budget: EvaluationBudget) -> None:
    """Population ``i`` steps on ticks divisible by ``4**i``, so between two
    generations of population ``i+1`` population ``i`` makes exactly four.
    A new population is created on the first tick its slot comes due."""
    pops: list[_ImsPopulation] = []
    cap = budget.max_generations_per_population
    m = IMS_SUBGENERATIONS
    tick = 0
    while True:
        lowest = next((p.index for p in pops if not p.terminated), len(pops))
        period = m ** lowest
        tick = (tick // period + 1) * period
        for p in pops:
            if p.terminated or tick % (m ** p.index):
                continue
            if _ims_should_stop(pops, p.index, cap):
                p.terminated = True
                run.log.append(("terminate", tick, p.index, p.generations))
                continue
            _ims_step(run, p, tick)
        if tick % (m ** len(pops)) == 0:
            size = IMS_FIRST_SIZE * 2 ** len(pops)
            run.log.append(("create", tick, len(pops), size))
            p = _ImsPopulation(len(pops), run.create_population(size))
            pops.append(p)
            _ims_step(run, p, tick)


def _ims_step(run: _Run, p: _ImsPopulation, tick: int) -> None:
    p.members = single_population_generation(p.members, run)
    p.generations += 1
    run.log.append(("generation", tick, p.index, p.generations))


class Pyramid:
    """Levels of unique genotypes; insertion order is kept within a level."""

    def __init__(self):
        self.levels: list[dict] = []

    def __len__(self) -> int:
        return len(self.levels)

    def add(self, level: int, s: Solution) -> bool:
        if level > len(self.levels):
            raise IndexError("levels can only grow one at a time")
        if level == len(self.levels):
            self.levels.append({})
        key = s.key()
        if key in self.levels[level]:
            return False
        self.levels[level][key] = s.copy()
        return True

    def members(self, level: int) -> list:
        return list(self.levels[level].values())


def growth(iteration: int, scheme: str) -> int:
    return iteration * iteration if scheme == "p3mi" else 1


def p3mi_iteration(pyramid: Pyramid, iteration: int, run: _Run) -> Pyramid:
    """Add ``growth(iteration)`` new solutions at the bottom and climb them.

    At each level the model is learned on that level alone, every current
    solution is mixed with the level as donors, and strict improvers are
    promoted one level up.  Climbing stops after a level with no promotion
    or at the top level that existed when the iteration started.
    """
    if iteration < 1:
        raise ValueError("iterations count from 1")
    current = run.create_population(growth(iteration, run.config.scheme))
    for s in current:
        pyramid.add(0, s)
    top = len(pyramid) - 1
    level = 0
    while level <= top:
        run.generations += 1
        offspring = run.mixing_pass(current, pyramid.members(level))
        promoted = False
        for parent, child in zip(current, offspring):
            if child.fitness > parent.fitness:
                pyramid.add(level + 1, child)
                promoted = True
        run.log.append(("level", iteration, level, promoted))
        current = offspring
        if not promoted:
            break
        level += 1
    return pyramid


def _pyramid(run: _Run, budget: EvaluationBudget) -> None:
    pyramid = Pyramid()
    iteration = 1
    while True:
        p3mi_iteration(pyramid, iteration, run)
        iteration += 1


_DISPATCH = {"single": _single, "ims": _ims, "p3": _pyramid, "p3mi": _pyramid}


def run(config: SchemeConfig, problem, budget: Optional[EvaluationBudget] = None,
        seed: int = 0, record_log: bool = True) -> RunRecord:
    """Optimise ``problem`` until the optimum is hit, the budget runs out, or
    the scheme stops on its own (single population converged)."""
    config.validate()
    budget = replace(budget) if budget is not None else EvaluationBudget()
    if config.scheme != "single" and budget.max_evaluations is None and budget.max_seconds is None:
        raise ConfigError("parameterless schemes need an evaluation or time limit")
    budget.start()
    evaluator = Evaluator(problem, budget, stop_on_optimum=True)
    state = _Run(config, evaluator, make_rng(seed))
    started = time.monotonic()
    try:
        _DISPATCH[config.scheme](state, budget)
    except RunTerminated:
        pass
    wall = time.monotonic() - started
    success = evaluator.optimum_found
    return RunRecord(
        seed=int(seed),
        config=asdict(config),
        problem=problem.kind,
        length=problem.length,
        success=success,
        evaluations=evaluator.evaluations_at_optimum if success else evaluator.evaluations,
        evaluations_used=evaluator.evaluations,
        best_fitness=None if evaluator.elitist is None else evaluator.elitist.fitness,
        generations=state.generations,
        wall_time=wall,
        log=state.log if record_log else [],
    )
