"""Seeded instance generators for every benchmark kind."""
from __future__ import annotations

import math

import numpy as np

from ..core import make_rng
from .functions import (
    HIFF, BimodalTrap, MaxCut, MaxSat, NKLandscape, OneMax, SpinGlass, Trap,
)

NK_K = 5
MAXSAT_CLAUSE_RATIO = 4.27


def grid_shape(length: int) -> tuple[int, int]:
    """Most square ``rows x cols`` factorisation with both sides >= 3."""
    rows = int(math.isqrt(length))
    while rows >= 3 and length % rows:
        rows -= 1
    if rows < 3 or length // rows < 3:
        raise ValueError(f"length {length} does not factor into a torus with sides >= 3")
    return rows, length // rows


def torus_edges(length: int) -> np.ndarray:
    """Each vertex linked to its right and lower neighbour, with wrap-around."""
    rows, cols = grid_shape(length)
    r, c = np.divmod(np.arange(length), cols)
    right = r * cols + (c + 1) % cols
    down = ((r + 1) % rows) * cols + c
    u = np.concatenate([np.arange(length), np.arange(length)])
    v = np.concatenate([right, down])
    return np.stack([np.minimum(u, v), np.maximum(u, v)], axis=1)


def maxcut_sparse(length: int, seed: int) -> MaxCut:
    rng = make_rng(seed)
    pairs = torus_edges(length)
    w = rng.integers(1, 6, size=len(pairs))
    return MaxCut(length, np.column_stack([pairs, w]), kind="maxcut-sparse")


def maxcut_dense(length: int, seed: int) -> MaxCut:
    if length < 2:
        raise ValueError("dense MAXCUT needs at least 2 vertices")
    rng = make_rng(seed)
    degree = min(math.ceil(math.sqrt(length)), length - 1)
    seen: dict[tuple[int, int], int] = {}
    for a in range(length):
        others = np.delete(np.arange(length), a)
        for b in rng.choice(others, size=degree, replace=False):
            w = int(rng.integers(0, 1001))
            seen.setdefault((min(a, int(b)), max(a, int(b))), w)
    edges = np.array([(a, b, w) for (a, b), w in seen.items()], dtype=np.int64)
    return MaxCut(length, edges, kind="maxcut-dense")


def spin_glass(length: int, seed: int) -> SpinGlass:
    rng = make_rng(seed)
    pairs = torus_edges(length)
    J = rng.choice(np.array([-1, 1]), size=len(pairs))
    return SpinGlass(length, np.column_stack([pairs, J]))


def nk_landscape(length: int, seed: int, k: int = NK_K) -> NKLandscape:
    if length < k:
        raise ValueError(f"NK needs length >= {k}")
    rng = make_rng(seed)
    return NKLandscape(rng.random((length - k + 1, 2 ** k)))


def max3sat(length: int, seed: int, ratio: float = MAXSAT_CLAUSE_RATIO) -> MaxSat:
    """Uniform random 3-SAT with a planted assignment, so every clause is satisfiable.

    Clauses falsified by the hidden assignment are redrawn, which makes the
    optimum equal to the number of clauses.
    """
    if length < 3:
        raise ValueError("MAX-3SAT needs at least 3 variables")
    rng = make_rng(seed)
    hidden = rng.integers(0, 2, size=length)
    m = max(1, round(ratio * length))
    clauses = []
    while len(clauses) < m:
        var = rng.choice(length, size=3, replace=False)
        sign = rng.integers(0, 2, size=3)
        # literal is positive when sign == 1; satisfied when hidden bit matches
        if np.any(hidden[var] == sign):
            clauses.append(np.where(sign == 1, var + 1, -(var + 1)))
    return MaxSat(length, np.array(clauses), optimum=float(m))


def generate_instance(kind: str, length: int, seed: int = 0):
    """Build an instance of ``kind`` with ``length`` variables.

    Traps, HIFF and OneMax are fully determined by ``length``.  NK, MAXCUT and
    spin-glass instances carry no optimum until one is attached (see
    :func:`gomea.problems.attach_optimum`).
    """
    if kind == "trap55":
        return Trap(length, 5, 5)
    if kind == "trap54":
        return Trap(length, 5, 4)
    if kind == "bimodal":
        return BimodalTrap(length)
    if kind == "hiff":
        return HIFF(length)
    if kind == "onemax":
        return OneMax(length)
    if kind == "nk":
        return nk_landscape(length, seed)
    if kind == "maxcut-sparse":
        return maxcut_sparse(length, seed)
    if kind == "maxcut-dense":
        return maxcut_dense(length, seed)
    if kind == "spinglass":
        return spin_glass(length, seed)
    if kind == "maxsat":
        return max3sat(length, seed)
    raise ValueError(f"unknown problem kind {kind!r}")
