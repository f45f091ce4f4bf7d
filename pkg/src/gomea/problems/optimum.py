"""Exact optima: exhaustive enumeration and the NK-S1 chain DP."""
from __future__ import annotations

import numpy as np

from .functions import NKLandscape

BRUTE_FORCE_MAX_LENGTH = 30


def all_genotypes(length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows are the binary expansions (bit 0 first) of ``start .. stop-1``."""
    stop = 2 ** length if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(length)) & 1).astype(np.uint8)


def brute_force_optimum(problem, chunk: int = 1 << 16) -> tuple[float, np.ndarray]:
    length = problem.length
    if length > BRUTE_FORCE_MAX_LENGTH:
        raise ValueError(f"brute force limited to length <= {BRUTE_FORCE_MAX_LENGTH}")
    best, best_x = -np.inf, None
    total = 2 ** length
    for start in range(0, total, chunk):
        X = all_genotypes(length, start, min(total, start + chunk))
        f = problem.evaluate_batch(X)
        i = int(np.argmax(f))
        if f[i] > best:
            best, best_x = float(f[i]), X[i].copy()
    return best, best_x


def nk_dp_optimum(problem: NKLandscape) -> tuple[float, np.ndarray]:
    """Maximise an adjacent NK landscape in O(l * 2**k).

    The state after window ``i`` is the last ``k-1`` bits of that window;
    the next window appends one bit to it.
    """
    table, k = problem.table, problem.k
    n_windows = table.shape[0]
    half = 1 << (k - 1)
    words = np.arange(1 << k)
    value = np.zeros(half)
    choice = np.empty((n_windows, half), dtype=np.int64)
    for i in range(n_windows):
        # window word w = (state << 1) | bit for the previous state w >> 1
        cand = value[words >> 1] + table[i]
        low, high = cand[:half], cand[half:]
        take_high = high > low
        choice[i] = np.where(take_high, words[half:], words[:half])
        value = np.where(take_high, high, low)

    # value[s] is indexed by the final k-1 bits
    state = int(np.argmax(value))
    best = float(value[state])
    words_taken = np.empty(n_windows, dtype=np.int64)
    for i in range(n_windows - 1, -1, -1):
        w = int(choice[i, state])
        words_taken[i] = w
        state = w >> 1
    x = np.empty(problem.length, dtype=np.uint8)
    x[:k] = (words_taken[0] >> np.arange(k - 1, -1, -1)) & 1
    for i in range(1, n_windows):
        x[i + k - 1] = words_taken[i] & 1
    return best, x


def attach_optimum(problem, method: str = "brute_force"):
    """Return a copy of ``problem`` carrying a certified optimum.

    ``method`` is ``brute_force`` (length <= 30), ``nk_dp`` (NK only) or
    ``declared`` (keep the value the instance already carries).
    """
    if method == "brute_force":
        value, _ = brute_force_optimum(problem)
    elif method == "nk_dp":
        if not isinstance(problem, NKLandscape):
            raise ValueError("nk_dp applies only to NK instances")
        value, _ = nk_dp_optimum(problem)
    elif method == "declared":
        if problem.optimum is None:
            raise ValueError("instance declares no optimum")
        value = problem.optimum
    else:
        raise ValueError(f"unknown certification method {method!r}")
    return problem.with_optimum(value)
