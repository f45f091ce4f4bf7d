"""Order statistics, rank aggregation and the one-sided Mann-Whitney U test."""
from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

EXACT_MAX_SMALLER_SAMPLE = 8


def order_statistic(values: Sequence[float], k: int) -> float:
    """``k``-th smallest value, 1-based."""
    ordered = sorted(values)
    if not 1 <= k <= len(ordered):
        raise ValueError(f"order statistic {k} out of range for {len(ordered)} values")
    return float(ordered[k - 1])


def summarize(values: Sequence[float]) -> dict:
    """Median plus the 3rd smallest and 3rd largest values.

    For 50 runs these are the 3rd and 48th order statistics.
    """
    values = [float(v) for v in values]
    if not values:
        return {"median": None, "low": None, "high": None, "count": 0}
    n = len(values)
    k = min(3, (n + 1) // 2)
    return {
        "median": float(np.median(values)),
        "low": order_statistic(values, k),
        "high": order_statistic(values, n - k + 1),
        "count": n,
    }


def _rank_sum_cdf(doubled_ranks: np.ndarray, n_a: int, observed: int) -> float:
    """P(sum of ``n_a`` ranks drawn without replacement <= observed)."""
    total = int(doubled_ranks.sum())
    ways = np.zeros((n_a + 1, total + 1))
    ways[0, 0] = 1.0
    for r in doubled_ranks:
        # walk k downwards so each rank is used at most once
        for k in range(min(n_a, len(doubled_ranks)), 0, -1):
            ways[k, r:] += ways[k - 1, : total + 1 - r]
    dist = ways[n_a]
    return float(dist[: observed + 1].sum() / dist.sum())


def mann_whitney_less(a: Sequence[float], b: Sequence[float]) -> float:
    """One-sided p-value for "``a`` is stochastically smaller than ``b``".

    Exact (tie-aware permutation distribution of the rank sum) when the
    smaller sample has at most 8 values; otherwise the normal approximation
    with tie and continuity corrections.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    n_a, n_b = a.size, b.size
    ranks = rankdata(np.concatenate([a, b]))
    if min(n_a, n_b) <= EXACT_MAX_SMALLER_SAMPLE:
        doubled = np.rint(2 * ranks).astype(np.int64)
        observed = int(doubled[:n_a].sum())
        return min(1.0, _rank_sum_cdf(doubled, n_a, observed))

    n = n_a + n_b
    u_a = ranks[:n_a].sum() - n_a * (n_a + 1) / 2.0
    _, ties = np.unique(ranks, return_counts=True)
    tie_term = float((ties ** 3 - ties).sum()) / (n * (n - 1))
    var = n_a * n_b / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = (u_a - n_a * n_b / 2.0 + 0.5) / math.sqrt(var)
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def rank_configs(medians: Mapping[str, Mapping[str, Optional[float]]]) -> list[tuple[str, float]]:
    """Average per-problem rank (1 = fewest median evaluations) of each config.

    ``medians[config][problem]`` is ``None`` when the config failed that
    problem; such configs are dropped before ranking.  Tied medians share
    the mean of their ranks.  Output is sorted best first.
    """
    problems = sorted({p for row in medians.values() for p in row})
    if not problems:
        raise ValueError("need at least one problem column")
    kept = [c for c, row in medians.items()
            if all(row.get(p) is not None for p in problems)]
    if not kept:
        return []
    table = np.array([[medians[c][p] for p in problems] for c in kept], dtype=float)
    ranks = np.column_stack([rankdata(table[:, j]) for j in range(len(problems))])
    avg = ranks.mean(axis=1)
    return sorted(zip(kept, avg.tolist()), key=lambda t: (t[1], t[0]))
