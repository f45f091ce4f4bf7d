"""Gene-pool optimal mixing (GOM), its conditional variant and forced improvements."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from .core import Evaluator, RandomSource, Solution, genotype_matrix
from .linkage import LinkageModel, fos_order


@dataclass
class VariationFlags:
    use_eds: bool = True
    use_fi: bool = True
    conditional: bool = False


@dataclass
class MixingContext:
    """Everything a mixing pass reads besides the solution itself.

    ``model`` must already exclude the root element.  ``ordering`` is applied
    afresh on every pass (``"none"`` keeps the model's own order).
    """

    donor_pool: list
    model: LinkageModel
    evaluator: Evaluator
    ordering: str = "none"
    donors: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.donor_pool:
            raise ValueError("donor pool must not be empty")
        if self.donors is None:
            self.donors = genotype_matrix(self.donor_pool)

    @cached_property
    def fi_threshold(self) -> float:
        return 1.0 + math.log10(len(self.donor_pool))

    @cached_property
    def element_indices(self) -> list:
        return [e.indices for e in self.model.elements]

    @cached_property
    def _groups(self) -> list:
        return [None] * len(self.model.elements)

    def donor_groups(self, pos: int) -> "_DonorGroups":
        """Donors grouped by their values on element ``pos``, built on first use."""
        groups = self._groups[pos]
        if groups is None:
            groups = self._groups[pos] = _DonorGroups.build(self.donors, self.element_indices[pos])
        return groups

    def differing_donor(self, pos: int, genes: np.ndarray, draw: "_UniformIndices",
                        rng: RandomSource) -> Optional[int]:
        """Uniform donor index among those differing from ``genes`` on element ``pos``."""
        return self.donor_groups(pos).draw_differing(genes[self.element_indices[pos]], draw, rng)

    @cached_property
    def _fixed_order(self) -> Optional[np.ndarray]:
        return None if self.ordering == "random" else fos_order(self.model, self.ordering, None)

    def processing_order(self, rng: RandomSource) -> np.ndarray:
        """Element positions for one pass; only the random ordering differs between passes."""
        fixed = self._fixed_order
        return fos_order(self.model, self.ordering, rng) if fixed is None else fixed


_REJECTION_TRIES = 4


@dataclass
class _DonorGroups:
    """Donors of one FOS element grouped by their values on it.

    ``order`` lists donor indices sorted by group; ``spans`` maps a value
    pattern to ``(label, start, count)`` within ``order``.
    """

    indices: np.ndarray
    dtype: np.dtype
    order: np.ndarray
    labels: list
    spans: dict

    @classmethod
    def build(cls, D: np.ndarray, F: np.ndarray) -> "_DonorGroups":
        P = np.ascontiguousarray(D[:, F])
        rows = P.view(np.dtype((np.void, P.dtype.itemsize * len(F)))).ravel()
        uniq, labels, counts = np.unique(rows, return_inverse=True, return_counts=True)
        labels = labels.ravel()
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        spans = {u.tobytes(): (g, int(st), int(c))
                 for g, (u, st, c) in enumerate(zip(uniq, starts, counts))}
        return cls(F, P.dtype, np.argsort(labels, kind="stable"), labels.tolist(), spans)

    def draw_differing(self, values: np.ndarray, draw: "_UniformIndices",
                       rng: RandomSource) -> Optional[int]:
        """``values`` are the offspring's genes on this element."""
        if values.dtype != self.dtype:
            values = values.astype(self.dtype)
        span = self.spans.get(values.tobytes())
        if span is None:
            return draw()
        label, start, count = span
        n = len(self.labels)
        if count == n:
            return None
        for _ in range(_REJECTION_TRIES):
            d = draw()
            if self.labels[d] != label:
                return d
        r = int(rng.integers(n - count))
        return int(self.order[r if r < start else r + count])


def check_donor(offspring: np.ndarray, donor: np.ndarray,
                conditioned: Iterable[int], processed: Iterable[int]) -> bool:
    """True iff both genotypes agree on every index in ``conditioned & processed``."""
    idx = sorted(set(conditioned) & set(processed))
    return bool(np.array_equal(offspring[idx], donor[idx]))


def _conditioned_now(deps: np.ndarray, processed: np.ndarray) -> np.ndarray:
    return deps[processed[deps]] if len(deps) else deps


def _same(a: np.ndarray, b: np.ndarray, idx: np.ndarray) -> bool:
    # byte comparison is several times faster than np.array_equal on short slices
    return a[idx].tobytes() == b[idx].tobytes()


def _admissible(row, genes, F, cond, need_diff) -> bool:
    if need_diff and _same(row, genes, F):
        return False
    return cond is None or _same(row, genes, cond)


class _UniformIndices:
    """Exactly uniform draws from ``range(n)``, fetched from the generator in blocks.

    One vectorised call per block is far cheaper than a generator call per
    donor draw.
    """

    __slots__ = ("rng", "n", "buf", "pos")
    BLOCK = 128

    def __init__(self, rng: RandomSource, n: int):
        self.rng, self.n = rng, n
        self.buf: list = []
        self.pos = 0

    def __call__(self) -> int:
        if self.pos == len(self.buf):
            self.buf = self.rng.integers(self.n, size=self.BLOCK).tolist()
            self.pos = 0
        self.pos += 1
        return self.buf[self.pos - 1]


def _draw_donor(D: np.ndarray, genes: np.ndarray, F: np.ndarray, cond: Optional[np.ndarray],
                need_diff: bool, rng: RandomSource, draw: _UniformIndices) -> Optional[int]:
    """Uniform draw among donors that differ on ``F`` (if ``need_diff``) and
    agree with ``genes`` on ``cond``; ``None`` when no donor qualifies.

    This is the same distribution as scanning a fresh random permutation of
    the donors for the first admissible one.  A few rejection-sampling
    attempts cover the usual case cheaply; otherwise the admissible set is
    computed outright.
    """
    for _ in range(_REJECTION_TRIES):
        d = draw()
        if _admissible(D[d], genes, F, cond, need_diff):
            return d
    mask = np.ones(len(D), dtype=bool)
    if need_diff:
        mask &= (D[:, F] != genes[F]).any(axis=1)
    if cond is not None:
        mask &= (D[:, cond] == genes[cond]).all(axis=1)
    candidates = np.flatnonzero(mask)
    if not len(candidates):
        return None
    return int(candidates[rng.integers(len(candidates))])


def _optimal_mixing(parent: Solution, ctx: MixingContext, flags: VariationFlags,
                    rng: RandomSource, conditional: bool, trace: Optional[list]) -> Solution:
    model = ctx.model
    if conditional and model.dependencies is None:
        raise ValueError("conditional mixing needs a model with learned dependencies")
    evaluator = ctx.evaluator
    D = ctx.donors
    draw = _UniformIndices(rng, len(D))
    o = parent.copy()
    genes = o.genotype
    backup_fitness = o.fitness
    changed = False
    processed = np.zeros(len(genes), dtype=bool) if conditional else None

    elements = ctx.element_indices
    groups = ctx._groups
    use_eds = flags.use_eds
    evaluate = evaluator.evaluate_and_update_elitist
    for pos in ctx.processing_order(rng):
        F = elements[pos]
        backup = genes[F]           # fancy indexing already copies
        cond = None
        if conditional:
            processed[F] = True
            cond = _conditioned_now(model.dependencies[pos], processed)
            if not len(cond):
                cond = None
        if cond is not None:
            d = _draw_donor(D, genes, F, cond, use_eds, rng, draw)
        elif use_eds:
            d = (groups[pos] or ctx.donor_groups(pos)).draw_differing(backup, draw, rng)
        else:
            d = draw()
        if d is None:
            continue
        donated = D[d][F]
        if not use_eds and donated.tobytes() == backup.tobytes():
            continue

        genes[F] = donated
        f = evaluate(o)
        if f > backup_fitness:
            accept = True
        elif f == backup_fitness:
            # equal fitness may drift across a plateau, but never away from the elitist
            genes[F] = backup
            accept = not evaluator.is_elitist(genes)
            if accept:
                genes[F] = donated
        else:
            accept = False
        if trace is not None:
            trace.append(("gom", F.copy(), donated, accept))
        if accept:
            backup_fitness = f
            changed = True
        else:
            genes[F] = backup
            o.fitness = backup_fitness

    if flags.use_fi and (not changed or parent.nis > ctx.fi_threshold):
        o = _forced_improvement(o, ctx, rng, conditional, trace)
    o.nis = parent.nis + 1 if o.fitness <= parent.fitness else 0
    return o


def _forced_improvement(o: Solution, ctx: MixingContext, rng: RandomSource,
                        conditional: bool, trace: Optional[list]) -> Solution:
    model = ctx.model
    evaluator = ctx.evaluator
    genes = o.genotype
    backup_fitness = o.fitness
    processed = np.zeros(len(genes), dtype=bool) if conditional else None

    for pos in fos_order(model, ctx.ordering, rng):
        F = model.elements[pos].indices
        elite = evaluator.elitist.genotype
        if conditional:
            cond = _conditioned_now(model.dependencies[pos], processed)
            if len(cond) and not _same(genes, elite, cond):
                continue
            processed[F] = True
        if _same(genes, elite, F):
            continue
        backup = genes[F].copy()
        values = elite[F].copy()
        genes[F] = values
        f = evaluator.evaluate_and_update_elitist(o)
        improved = f > backup_fitness
        if trace is not None:
            trace.append(("fi", F.copy(), values, improved))
        if improved:
            return o
        genes[F] = backup
        o.fitness = backup_fitness

    replacement = evaluator.elitist.copy()
    replacement.nis = o.nis
    if trace is not None:
        trace.append(("overwrite", None, replacement.genotype.copy(), True))
    return replacement


def gom(parent: Solution, ctx: MixingContext, flags: VariationFlags, rng: RandomSource,
        trace: Optional[list] = None) -> Solution:
    """One GOM pass over ``parent``; the result is never worse than the input.

    If ``trace`` is a list, every attempted copy is appended as
    ``(kind, indices, values, accepted)``.
    """
    return _optimal_mixing(parent, ctx, flags, rng, False, trace)


def cgom(parent: Solution, ctx: MixingContext, flags: VariationFlags, rng: RandomSource,
         trace: Optional[list] = None) -> Solution:
    """GOM where a donor for element ``F`` must agree with the offspring on the
    already-processed variables that ``F`` depends on."""
    return _optimal_mixing(parent, ctx, flags, rng, True, trace)


def mix(parent: Solution, ctx: MixingContext, flags: VariationFlags, rng: RandomSource,
        trace: Optional[list] = None) -> Solution:
    return _optimal_mixing(parent, ctx, flags, rng, flags.conditional, trace)


def forced_improvement(solution: Solution, ctx: MixingContext, flags: VariationFlags,
                       rng: RandomSource, trace: Optional[list] = None) -> Solution:
    """Copy elitist genes element by element until the first strict improvement;
    if none happens, return a copy of the elitist."""
    if ctx.evaluator.elitist is None:
        raise ValueError("forced improvement needs an elitist")
    return _forced_improvement(solution.copy(), ctx, rng, flags.conditional, trace)


def replay_trace(start: np.ndarray, trace: list) -> np.ndarray:
    """Rebuild a mixing result from its recorded accepted copies."""
    genes = start.copy()
    for kind, indices, values, accepted in trace:
        if not accepted:
            continue
        if kind == "overwrite":
            genes = values.copy()
        else:
            genes[indices] = values
    return genes
