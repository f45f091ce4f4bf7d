from .bisection import (
    BisectionResult, Caps, SizeTrial, bisect_population_size, bisect_sizes, derive_seeds,
)
from .stats import mann_whitney_less, order_statistic, rank_configs, summarize
from .sweep import SweepSummary, certified_instance, scalability_sweep, summary_row

__all__ = [
    "BisectionResult", "Caps", "SizeTrial", "bisect_population_size", "bisect_sizes",
    "derive_seeds", "mann_whitney_less", "order_statistic", "rank_configs", "summarize",
    "SweepSummary", "certified_instance", "scalability_sweep", "summary_row",
]
