"""Benchmark fitness functions (all maximized).

Every instance exposes ``evaluate(x)`` for a single genotype and
``evaluate_batch(X)`` for a 2-D array of genotypes.  Instances are
immutable after construction and safe to share between runs.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

KINDS = (
    "trap55", "trap54", "bimodal", "nk", "hiff",
    "maxcut-sparse", "maxcut-dense", "spinglass", "maxsat", "onemax",
)


class ProblemInstance:
    kind: str = ""
    length: int = 0
    optimum: Optional[float] = None

    def evaluate(self, x: np.ndarray) -> float:
        return float(self.evaluate_batch(np.asarray(x)[None, :])[0])

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _payload(self) -> tuple:
        return ()

    def with_optimum(self, optimum: Optional[float]) -> "ProblemInstance":
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.optimum = optimum
        return clone

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        if (self.kind, self.length, self.optimum) != (other.kind, other.length, other.optimum):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._payload(), other._payload()))

    __hash__ = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind!r}, length={self.length}, optimum={self.optimum})"


class OneMax(ProblemInstance):
    kind = "onemax"

    def __init__(self, length: int):
        self.length = int(length)
        self.optimum = float(length)

    def evaluate(self, x):
        return float(np.count_nonzero(x))

    def evaluate_batch(self, X):
        return np.count_nonzero(X, axis=1).astype(float)


class Trap(ProblemInstance):
    """Concatenated deceptive traps of size ``k`` with block stride ``s``.

    Blocks start at ``0, s, 2s, ...`` and wrap around the end of the string,
    so ``s < k`` gives overlapping blocks.
    """

    def __init__(self, length: int, k: int = 5, s: int = 5):
        if length < k or length % s:
            raise ValueError(f"trap with k={k}, s={s} needs length >= k and divisible by {s}")
        self.kind = "trap55" if (k, s) == (5, 5) else "trap54" if (k, s) == (5, 4) else f"trap{k}{s}"
        self.length, self.k, self.s = int(length), int(k), int(s)
        starts = np.arange(0, self.length, self.s)
        self.blocks = (starts[:, None] + np.arange(k)[None, :]) % self.length
        self.table = np.array([k - 1 - u for u in range(k)] + [k], dtype=np.int64)
        self.optimum = float(len(starts) * k)
        self._ones = np.ones(k, dtype=np.uint8)

    def _payload(self):
        return (self.blocks,)

    def evaluate(self, x):
        # block unitations via a dot with ones, then a histogram of unitations
        # weighted by the table: both far cheaper than sum + fancy indexing
        blocks = x.reshape(-1, self.k) if self.s == self.k else x[self.blocks]
        return float(np.bincount(blocks.dot(self._ones), minlength=self.k + 1).dot(self.table))

    def evaluate_batch(self, X):
        u = X[:, self.blocks].sum(axis=2)
        return self.table[u].sum(axis=1).astype(float)


class BimodalTrap(ProblemInstance):
    kind = "bimodal"
    TABLE = np.array([6, 0, 2, 5, 2, 0, 6], dtype=np.int64)
    _ONES = np.ones(6, dtype=np.uint8)

    def __init__(self, length: int):
        if length < 6 or length % 6:
            raise ValueError("bimodal trap needs length divisible by 6")
        self.length = int(length)
        self.optimum = float(length)

    def evaluate(self, x):
        return float(np.bincount(x.reshape(-1, 6).dot(self._ONES), minlength=7).dot(self.TABLE))

    def evaluate_batch(self, X):
        u = X.reshape(len(X), -1, 6).sum(axis=2)
        return self.TABLE[u].sum(axis=1).astype(float)


class NKLandscape(ProblemInstance):
    """Adjacent NK landscape with maximum overlap (one window per position).

    Row ``i`` of ``table`` scores the window ``x[i:i+k]`` read as a
    big-endian integer.
    """

    kind = "nk"

    def __init__(self, table: np.ndarray, optimum: Optional[float] = None):
        table = np.asarray(table, dtype=float)
        k = int(round(np.log2(table.shape[1])))
        if table.ndim != 2 or 2 ** k != table.shape[1]:
            raise ValueError("NK table must have 2**k columns")
        self.table = table
        self.k = k
        self.length = table.shape[0] + k - 1
        self.optimum = optimum
        self.windows = np.arange(table.shape[0])[:, None] + np.arange(k)[None, :]
        self.weights = 1 << np.arange(k - 1, -1, -1)
        self._rows = np.arange(table.shape[0])

    def _payload(self):
        return (self.table,)

    def evaluate(self, x):
        idx = x[self.windows] @ self.weights
        return float(self.table[self._rows, idx].sum())

    def evaluate_batch(self, X):
        idx = X[:, self.windows] @ self.weights
        return self.table[self._rows[None, :], idx].sum(axis=1)


class HIFF(ProblemInstance):
    kind = "hiff"

    def __init__(self, length: int):
        if length < 1 or length & (length - 1):
            raise ValueError("HIFF length must be a power of two")
        self.length = int(length)
        self.optimum = float(2 * length - 1)

    def evaluate(self, x):
        total = self.length
        k = 2
        while k <= self.length:
            u = x.reshape(-1, k).sum(axis=1)
            total += int(np.count_nonzero((u == 0) | (u == k)))
            k *= 2
        return float(total)

    def evaluate_batch(self, X):
        total = np.full(len(X), self.length, dtype=np.int64)
        k = 2
        while k <= self.length:
            u = X.reshape(len(X), -1, k).sum(axis=2)
            total += np.count_nonzero((u == 0) | (u == k), axis=1)
            k *= 2
        return total.astype(float)


class _EdgeProblem(ProblemInstance):
    def __init__(self, length: int, edges: np.ndarray, optimum: Optional[float] = None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 3)
        if len(edges) and (edges[:, :2].min() < 0 or edges[:, :2].max() >= length):
            raise ValueError("edge endpoint out of range")
        self.length = int(length)
        self.edges = edges
        self.u, self.v, self.w = edges[:, 0], edges[:, 1], edges[:, 2]
        self.optimum = optimum

    def _payload(self):
        return (self.edges,)


class MaxCut(_EdgeProblem):
    def __init__(self, length, edges, optimum=None, kind="maxcut-sparse"):
        super().__init__(length, edges, optimum)
        if len(self.w) and self.w.min() < 0:
            raise ValueError("MAXCUT weights must be non-negative")
        self.kind = kind

    def evaluate(self, x):
        return float(self.w[x[self.u] != x[self.v]].sum())

    def evaluate_batch(self, X):
        return ((X[:, self.u] != X[:, self.v]) @ self.w).astype(float)


class SpinGlass(_EdgeProblem):
    """Ising spin glass; bit ``x`` maps to spin ``2x - 1``."""

    kind = "spinglass"

    def __init__(self, length, edges, optimum=None):
        super().__init__(length, edges, optimum)
        if not np.all(np.abs(self.w) == 1):
            raise ValueError("spin-glass couplings must be -1 or 1")

    def evaluate(self, x):
        same = x[self.u] == x[self.v]
        return float(np.where(same, self.w, -self.w).sum())

    def evaluate_batch(self, X):
        same = X[:, self.u] == X[:, self.v]
        return np.where(same, self.w, -self.w).sum(axis=1).astype(float)


class MaxSat(ProblemInstance):
    """Unweighted MAX-3SAT.  ``clauses`` holds signed 1-based literals."""

    kind = "maxsat"

    def __init__(self, length: int, clauses: np.ndarray, optimum: Optional[float] = None):
        clauses = np.asarray(clauses, dtype=np.int64)
        if clauses.ndim != 2 or clauses.shape[1] != 3:
            raise ValueError("every clause must have exactly 3 literals")
        if np.any(clauses == 0) or np.abs(clauses).max(initial=0) > length:
            raise ValueError("literal out of range")
        self.length = int(length)
        self.clauses = clauses
        self.var = np.abs(clauses) - 1
        self.neg = (clauses < 0).astype(np.uint8)
        self.optimum = optimum

    def _payload(self):
        return (self.clauses,)

    def evaluate(self, x):
        return float(np.count_nonzero((x[self.var] ^ self.neg).any(axis=1)))

    def evaluate_batch(self, X):
        return np.count_nonzero((X[:, self.var] ^ self.neg).any(axis=2), axis=1).astype(float)
