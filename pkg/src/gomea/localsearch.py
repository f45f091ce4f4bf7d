"""Bit-flip hill climbers applied to freshly created solutions."""
from __future__ import annotations

from .core import Evaluator, RandomSource, Solution


def sihc(s: Solution, evaluator: Evaluator, rng: RandomSource) -> tuple[Solution, bool]:
    """One sweep over all positions in random order, keeping strictly improving flips.

    Works in place on ``s`` and costs exactly ``l`` evaluations, plus one if
    ``s`` arrives unevaluated.
    """
    if not s.evaluated:
        evaluator.evaluate_and_update_elitist(s)
    genes = s.genotype
    improved = False
    for i in rng.permutation(len(genes)):
        current = s.fitness
        genes[i] ^= 1
        if evaluator.evaluate_and_update_elitist(s) > current:
            improved = True
        else:
            genes[i] ^= 1
            s.fitness = current
    return s, improved


def ehc(s: Solution, evaluator: Evaluator, rng: RandomSource) -> Solution:
    """Repeat :func:`sihc` sweeps until one makes no improvement."""
    improved = True
    while improved:
        s, improved = sihc(s, evaluator, rng)
    return s
