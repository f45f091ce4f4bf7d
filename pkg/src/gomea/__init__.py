"""Gene-pool optimal mixing evolutionary algorithms for binary optimisation."""
from .core import EvaluationBudget, Evaluator, Solution, make_rng
from .schemes import PRESETS, RunRecord, SchemeConfig, run

__all__ = ["EvaluationBudget", "Evaluator", "Solution", "make_rng",
           "PRESETS", "RunRecord", "SchemeConfig", "run"]
