"""Linkage learning: pairwise (N)MI, linkage trees, FOS ordering and CGOM dependencies."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import RandomSource

FILTER_EPSILON = 1e-6
MEASURES = ("mi", "nmi")
ORDERINGS = ("random", "ascending")


@dataclass
class SimilarityMatrix:
    values: np.ndarray
    measure: str

    @property
    def length(self) -> int:
        return self.values.shape[0]


@dataclass
class FosElement:
    indices: np.ndarray
    merge_similarity: Optional[float] = None
    # positions of the two merged children in the unfiltered tree
    children: Optional[tuple[int, int]] = None

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class LinkageModel:
    elements: list
    dependencies: Optional[list] = None
    # full merge history before filtering; None for hand-built models
    tree: Optional[list] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def index_sets(self) -> list[set]:
        return [set(e.indices.tolist()) for e in self.elements]

    def without_root(self, length: int) -> "LinkageModel":
        keep = [i for i, e in enumerate(self.elements) if len(e) != length]
        deps = None if self.dependencies is None else [self.dependencies[i] for i in keep]
        return LinkageModel([self.elements[i] for i in keep], deps, self.tree)

    @classmethod
    def from_sets(cls, sets: Sequence, dependencies: Optional[Sequence] = None) -> "LinkageModel":
        elements = [FosElement(np.array(sorted(s), dtype=np.int64)) for s in sets]
        deps = None
        if dependencies is not None:
            deps = [np.array(sorted(d), dtype=np.int64) for d in dependencies]
        return cls(elements, deps)


def _plogp(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = -p[nz] * np.log2(p[nz])
    return out


def build_similarity_matrix(genotypes: np.ndarray, measure: str = "nmi") -> SimilarityMatrix:
    """Pairwise MI or NMI from empirical bit frequencies (base-2 logs).

    ``genotypes`` is an ``n x l`` 0/1 matrix.  NMI is 0 where the joint
    entropy is 0.
    """
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    X = np.asarray(genotypes, dtype=np.float64)
    n = X.shape[0]
    if n < 1:
        raise ValueError("need at least one genotype")
    ones = X.sum(axis=0)
    n11 = X.T @ X
    n10 = ones[:, None] - n11
    n01 = ones[None, :] - n11
    n00 = n - n11 - n10 - n01
    h_joint = (_plogp(n11 / n) + _plogp(n10 / n) + _plogp(n01 / n) + _plogp(n00 / n))
    p1 = ones / n
    h = _plogp(p1) + _plogp(1.0 - p1)
    mi = np.maximum(h[:, None] + h[None, :] - h_joint, 0.0)
    if measure == "mi":
        return SimilarityMatrix(mi, measure)
    nmi = np.zeros_like(mi)
    pos = h_joint > 0
    nmi[pos] = mi[pos] / h_joint[pos]
    return SimilarityMatrix(np.clip(nmi, 0.0, 1.0), measure)


def build_linkage_tree(sim: SimilarityMatrix, filtered: bool, rng: RandomSource) -> LinkageModel:
    """Average-linkage (UPGMA) agglomeration with a nearest-neighbour chain.

    Variables are relabelled by a random permutation first; ties are then
    resolved towards the lowest relabelled cluster, which makes tie-breaking
    uniform over variables while keeping the chain cycle-free.  Elements come
    out as singletons (in relabelled order) followed by merges in merge order.
    With ``filtered``, both children of any merge whose similarity exceeds
    ``1 - 1e-6`` are dropped.  The root is always kept.
    """
    length = sim.length
    if length < 2:
        raise ValueError("linkage tree needs at least 2 variables")
    perm = rng.permutation(length)
    S = sim.values[np.ix_(perm, perm)].astype(np.float64, copy=True)
    np.fill_diagonal(S, -np.inf)

    tree: list[FosElement] = [FosElement(np.array([v], dtype=np.int64)) for v in perm]
    node_of = list(range(length))      # slot -> tree position
    size = np.ones(length)
    active = np.ones(length, dtype=bool)
    chain: list[int] = []
    remaining = length
    while remaining > 1:
        if not chain:
            chain.append(int(np.flatnonzero(active)[0]))
        a = chain[-1]
        row = S[a]
        best = int(np.argmax(row))
        if len(chain) > 1 and row[chain[-2]] >= row[best]:
            best = chain[-2]
        if len(chain) > 1 and best == chain[-2]:
            chain.pop()
            chain.pop()
            lo, hi = min(a, best), max(a, best)
            similarity = float(S[lo, hi])
            merged = (size[lo] * S[lo] + size[hi] * S[hi]) / (size[lo] + size[hi])
            active[hi] = False
            merged[~active] = -np.inf
            merged[lo] = -np.inf
            S[lo, :] = merged
            S[:, lo] = merged
            S[hi, :] = -np.inf
            S[:, hi] = -np.inf
            left, right = node_of[lo], node_of[hi]
            indices = np.sort(np.concatenate([tree[left].indices, tree[right].indices]))
            tree.append(FosElement(indices, similarity, (left, right)))
            node_of[lo] = len(tree) - 1
            size[lo] += size[hi]
            remaining -= 1
        else:
            chain.append(best)

    keep = np.ones(len(tree), dtype=bool)
    if filtered:
        for element in tree[length:]:
            if element.merge_similarity > 1.0 - FILTER_EPSILON:
                keep[list(element.children)] = False
        keep[-1] = True
    return LinkageModel([e for e, k in zip(tree, keep) if k], None, tree)


def fos_order(model: LinkageModel, ordering: str, rng: RandomSource) -> np.ndarray:
    """Positions of ``model.elements`` in processing order."""
    if ordering == "random":
        return rng.permutation(len(model.elements))
    if ordering == "ascending":
        sizes = np.array([len(e) for e in model.elements])
        return np.argsort(sizes, kind="stable")
    if ordering == "none":
        return np.arange(len(model.elements))
    raise ValueError(f"unknown FOS ordering {ordering!r}")


def order_fos(model: LinkageModel, ordering: str, rng: RandomSource) -> LinkageModel:
    order = fos_order(model, ordering, rng)
    deps = None if model.dependencies is None else [model.dependencies[i] for i in order]
    return replace(model, elements=[model.elements[i] for i in order], dependencies=deps)


def learn_dependencies(model: LinkageModel, sim: SimilarityMatrix, lam: float) -> LinkageModel:
    """Attach to each element the outside variables it is conditionally linked to.

    For element F, ``R_j`` is the mean similarity between outside variable j
    and the members of F, and ``M`` the largest such mean.  Variable j is a
    dependency when ``R_j > lam * M > 0``.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("lambda must lie in (0, 1]")
    S = sim.values
    length = S.shape[0]
    deps = []
    for element in model.elements:
        outside = np.ones(length, dtype=bool)
        outside[element.indices] = False
        if not outside.any():
            deps.append(np.zeros(0, dtype=np.int64))
            continue
        R = S[:, element.indices].mean(axis=1)
        M = R[outside].max()
        threshold = lam * M
        if threshold > 0:
            deps.append(np.flatnonzero(outside & (R > threshold)))
        else:
            deps.append(np.zeros(0, dtype=np.int64))
    return replace(model, dependencies=deps)
