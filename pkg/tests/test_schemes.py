import json
from collections import defaultdict
from dataclasses import replace

import numpy as np
import pytest

from gomea.core import EvaluationBudget, Evaluator, Solution, make_rng
from gomea.problems import OneMax, generate_instance
from gomea.schemes import (
    PRESETS, ConfigError, Pyramid, SchemeConfig, _Run, growth, p3mi_iteration, run,
    single_population_generation, tournament_winners,
)

GOMEA = PRESETS["gomea-best"]


def test_presets_match_reported_best_settings():
    g = PRESETS["gomea-best"]
    assert (g.scheme, g.hc, g.tournament, g.measure, g.filtered, g.ordering, g.use_fi, g.use_eds,
            g.conditional) == ("single", "sihc", True, "nmi", True, "ascending", True, True, False)
    c = PRESETS["cgomea-best"]
    assert c.conditional and c.lam == 0.8 and replace(c, conditional=False) == g
    p = PRESETS["gomea-p3-best"]
    assert (p.scheme, p.hc, p.tournament, p.ordering, p.use_fi, p.use_eds) == (
        "p3", "sihc", False, "random", False, True)
    for cfg in PRESETS.values():
        if cfg.scheme == "single":
            replace(cfg, population_size=4).validate()
        else:
            cfg.validate()


@pytest.mark.parametrize("bad", [
    dict(scheme="single", population_size=None),
    dict(scheme="single", population_size=1),
    dict(scheme="p3", population_size=10),
    dict(scheme="ga", population_size=4),
    dict(population_size=4, measure="mi", filtered=True),
    dict(population_size=4, measure="nmi", filtered=False),
    dict(population_size=4, hc="tabu"),
    dict(population_size=4, ordering="descending"),
    dict(population_size=4, conditional=True, lam=0.0),
    dict(population_size=4, conditional=True, lam=1.5),
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        replace(SchemeConfig(), **bad).validate()


def test_invalid_config_rejected_before_any_evaluation():
    class Exploding(OneMax):
        def evaluate(self, x):
            raise AssertionError("evaluated")
    with pytest.raises(ConfigError):
        run(replace(GOMEA, population_size=1), Exploding(4))


def test_parameterless_scheme_needs_a_limit():
    with pytest.raises(ConfigError):
        run(PRESETS["gomea-p3-best"], OneMax(8))


def test_onemax_single_population_success():
    rec = run(replace(GOMEA, population_size=8), OneMax(8), seed=3)
    assert rec.success and rec.best_fitness == 8
    assert rec.evaluations <= rec.evaluations_used


def test_budget_respected():
    p = generate_instance("trap55", 640)
    rec = run(replace(GOMEA, population_size=10), p, EvaluationBudget(max_evaluations=10))
    assert not rec.success and rec.evaluations_used <= 10


def test_runs_are_deterministic_in_seed():
    p = generate_instance("trap55", 20)
    cfg = replace(GOMEA, population_size=30)
    a, b = run(cfg, p, seed=7), run(cfg, p, seed=7)
    assert a == b
    for preset in ("gomea-p3-best", "cgomea-p3-best"):
        budget = EvaluationBudget(max_evaluations=20000)
        assert run(PRESETS[preset], p, budget, seed=1) == run(PRESETS[preset], p, budget, seed=1)


def test_generation_cap_limits_single_population():
    p = generate_instance("nk", 20, seed=1)  # no optimum attached: never stops early
    rec = run(replace(GOMEA, population_size=6, use_fi=False), p,
              EvaluationBudget(max_generations_per_population=3))
    assert rec.generations <= 3
    assert not rec.success


def test_tournament_winners_pick_the_fitter_member():
    fitness = np.array([1.0, 5.0, 3.0, 5.0])
    rng = make_rng(0)
    for _ in range(50):
        w = tournament_winners(fitness, rng)
        assert len(w) == 4
    # a dominant individual wins every tournament it takes part in
    fitness = np.array([0.0] * 9 + [10.0])
    counts = np.zeros(10)
    for _ in range(500):
        counts += np.bincount(tournament_winners(fitness, rng), minlength=10)
    share = counts[9] / counts.sum()
    assert share == pytest.approx(1 - 0.9 ** 2, abs=0.03)


def test_tournament_does_not_alter_population():
    p = generate_instance("trap55", 20)
    run_state = _Run(replace(GOMEA, population_size=12), Evaluator(p, stop_on_optimum=False), make_rng(0))
    pop = run_state.create_population(12)
    snapshot = [s.genotype.copy() for s in pop]
    run_state.learn_model(pop)
    assert all(np.array_equal(a, s.genotype) for a, s in zip(snapshot, pop))


def test_mean_fitness_never_drops_with_two_members():
    p = OneMax(8)
    for seed in range(10):
        state = _Run(replace(GOMEA, population_size=2), Evaluator(p, stop_on_optimum=False), make_rng(seed))
        pop = state.create_population(2)
        means = [np.mean([s.fitness for s in pop])]
        for _ in range(5):
            pop = single_population_generation(pop, state)
            means.append(np.mean([s.fitness for s in pop]))
        assert all(b >= a for a, b in zip(means, means[1:]))


def test_offspring_never_worse_than_parents_each_generation():
    p = generate_instance("nk", 20, seed=3)
    state = _Run(replace(GOMEA, population_size=16), Evaluator(p, stop_on_optimum=False), make_rng(2))
    pop = state.create_population(16)
    for _ in range(4):
        new = single_population_generation(pop, state)
        assert all(o.fitness >= s.fitness for o, s in zip(new, pop))
        pop = new


def _ims_record(seed=0, max_evals=30000):
    p = generate_instance("trap55", 40)
    return run(replace(PRESETS["gomea-best"], scheme="ims", population_size=None), p,
               EvaluationBudget(max_evaluations=max_evals), seed=seed)


def test_ims_creates_doubling_populations():
    rec = _ims_record()
    sizes = [e[3] for e in rec.log if e[0] == "create"]
    assert len(sizes) >= 3
    assert sizes == [2 * 2 ** i for i in range(len(sizes))]


def _check_four_to_one(rec):
    events = defaultdict(list)
    for pos, e in enumerate(rec.log):
        if e[0] == "generation":
            events[e[2]].append(pos)
    terminated = {e[2]: pos for pos, e in enumerate(rec.log) if e[0] == "terminate"}
    checked = 0
    for i in sorted(events):
        upper = events.get(i + 1, [])
        for a, b in zip(upper, upper[1:]):
            if i in terminated and terminated[i] < b:
                continue
            between = [p for p in events[i] if a < p < b]
            assert len(between) == 4
            checked += 1
    return checked


def test_ims_schedule_without_terminations(monkeypatch):
    import gomea.schemes as schemes
    monkeypatch.setattr(schemes, "_ims_should_stop", lambda pops, i, cap: False)
    rec = _ims_record(max_evals=60000)
    creation = {e[2]: k for k, e in enumerate(rec.log) if e[0] == "create"}
    assert len(creation) >= 4
    # population i+1 appears right after population i's fourth generation
    for i in range(len(creation) - 1):
        before = [e for e in rec.log[:creation[i + 1]] if e[0] == "generation" and e[2] == i]
        assert len(before) == 4
    gens0 = [e for e in rec.log[:creation[1]] if e[0] == "generation" and e[2] == 0]
    assert [e[3] for e in gens0] == [1, 2, 3, 4]
    assert _check_four_to_one(rec) > 3


def test_ims_real_runs_keep_the_interleave_until_termination():
    for seed in range(3):
        _check_four_to_one(_ims_record(seed, max_evals=60000))


def test_ims_terminated_population_is_never_stepped_again():
    for seed in range(3):
        rec = _ims_record(seed)
        dead = {}
        for pos, e in enumerate(rec.log):
            if e[0] == "terminate":
                dead[e[2]] = pos
            elif e[0] == "generation" and e[2] in dead:
                pytest.fail(f"population {e[2]} stepped after termination")


def test_growth_functions():
    assert [growth(t, "p3mi") for t in (1, 2, 3)] == [1, 4, 9]
    assert [growth(t, "p3") for t in (1, 2, 3)] == [1, 1, 1]


def test_p3mi_iterations_add_quadratic_numbers_of_solutions():
    p = generate_instance("nk", 16, seed=2)
    cfg = replace(PRESETS["gomea-p3-best"], scheme="p3mi")
    ev = Evaluator(p, stop_on_optimum=False)
    state = _Run(cfg, ev, make_rng(0))
    pyramid = Pyramid()
    calls = []
    original = state.create_population
    state.create_population = lambda n: calls.append(n) or original(n)
    for t in (1, 2, 3):
        p3mi_iteration(pyramid, t, state)
    assert calls == [1, 4, 9]
    with pytest.raises(ValueError):
        p3mi_iteration(pyramid, 0, state)


def test_pyramid_levels_hold_unique_strictly_improved_genotypes():
    p = generate_instance("trap55", 20)
    cfg = PRESETS["gomea-p3-best"]
    state = _Run(cfg, Evaluator(p, stop_on_optimum=False), make_rng(5))
    pyramid = Pyramid()
    for t in range(1, 40):
        p3mi_iteration(pyramid, t, state)
    assert len(pyramid) >= 2
    for level in pyramid.levels:
        keys = list(level)
        assert len(keys) == len(set(keys))
    # every level above 0 only ever receives better-than-parent offspring
    for kind, it, level, promoted in (e for e in state.log if e[0] == "level"):
        assert level < len(pyramid)
    for lower, upper in zip(pyramid.levels, pyramid.levels[1:]):
        assert max(s.fitness for s in upper.values()) >= min(s.fitness for s in lower.values())


def test_pyramid_add_semantics():
    pyr = Pyramid()
    a = Solution(np.array([0, 1, 0, 1], dtype=np.uint8), 2.0)
    assert pyr.add(0, a)
    assert not pyr.add(0, a.copy())
    with pytest.raises(IndexError):
        pyr.add(2, a)
    assert pyr.add(1, a)
    assert len(pyr) == 2 and len(pyr.members(0)) == 1


def test_p3_solves_small_trap():
    p = generate_instance("trap55", 20)
    rec = run(PRESETS["gomea-p3-best"], p, EvaluationBudget(max_evaluations=200000), seed=1)
    assert rec.success


def test_cgomea_single_population_solves_small_nk():
    from gomea.problems import attach_optimum
    p = attach_optimum(generate_instance("nk", 15, seed=4), "nk_dp")
    recs = [run(replace(PRESETS["cgomea-best"], population_size=60), p, seed=s) for s in range(5)]
    assert all(r.success for r in recs)


def test_run_record_serialises():
    rec = run(replace(GOMEA, population_size=8), OneMax(8), seed=3)
    d = json.loads(json.dumps(rec.to_dict()))
    assert d["success"] and d["config"]["scheme"] == "single"
