"""Orchestration: per-class lattice synthesis, runtime modes, and an
enumeration-based reference oracle.

Pipeline per class: collect labeled atoms, find coverage-set candidates
(antichain of representatives, or every maximal's coverage set when
abstraction is disabled), solve minimum cover, concretize each chosen
coverage set into one maximal from the top, and transform it into a guarded
clause. Modes swap the maximal search (element-difference vs. materialized
enumeration) and toggle the representative abstraction; all four agree on
selected objects and clause counts.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from . import _backend
from .cover import CoverInstance, min_cover_indices
from .dataset import Dataset, EditRequest, Specification, build_specification, partition_by_class
from .dsl import (
    Predicate,
    Program,
    build_program,
    check_correctness,
    element_to_predicate,
    or_join,
)
from .errors import LatticeDomainError
from .lattice import (
    LatticeContext,
    LatticeElement,
    atom_of,
    build_context,
    element_from_row,
    join_rows,
    lattice_size,
    materialize,
    stack_rows,
)
from .reps import coverage_masks, mask_antichain
from .search import Deadline, concretize_representative, find_maximals_rows


class SynthesisMode(enum.Enum):
    FULL = "full"
    NO_DIFFERENCE = "no-diff"
    NO_ABSTRACTION = "no-abstraction"
    NAIVE = "naive"

    @property
    def uses_difference(self) -> bool:
        return self in (SynthesisMode.FULL, SynthesisMode.NO_ABSTRACTION)

    @property
    def uses_abstraction(self) -> bool:
        return self in (SynthesisMode.FULL, SynthesisMode.NO_DIFFERENCE)

    @staticmethod
    def parse(text: str) -> "SynthesisMode":
        alias = {
            "full": SynthesisMode.FULL,
            "no-diff": SynthesisMode.NO_DIFFERENCE,
            "no_difference": SynthesisMode.NO_DIFFERENCE,
            "no-difference": SynthesisMode.NO_DIFFERENCE,
            "no-abstraction": SynthesisMode.NO_ABSTRACTION,
            "no_abstraction": SynthesisMode.NO_ABSTRACTION,
            "naive": SynthesisMode.NAIVE,
        }
        try:
            return alias[text.lower()]
        except KeyError:
            raise LatticeDomainError(
                f"unknown mode {text!r}; expected full|no-diff|no-abstraction|naive"
            )


@dataclass(frozen=True)
class ClassStats:
    class_name: str
    lattice_size: int
    maximals_examined: int
    representatives: int
    cover_size: int


@dataclass(frozen=True)
class SynthesisReport:
    program: Program
    predicate: Predicate
    per_class: tuple[ClassStats, ...]
    wall_time_s: float
    mode: SynthesisMode
    backend: str

    def stats_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "backend": self.backend,
            "wall_time_s": self.wall_time_s,
            "classes": [
                {
                    "class": s.class_name,
                    "lattice_size": s.lattice_size,
                    "maximals_examined": s.maximals_examined,
                    "representatives": s.representatives,
                    "cover_size": s.cover_size,
                }
                for s in self.per_class
            ],
        }


PositiveArg = Union[LatticeElement, tuple[str, LatticeElement]]


def _normalize_positives(positives: Sequence[PositiveArg]) -> list[tuple[str, LatticeElement]]:
    out = []
    for i, p in enumerate(positives):
        if isinstance(p, LatticeElement):
            out.append((f"p{i}", p))
        else:
            out.append((p[0], p[1]))
    return out


def _empty_rows(ctx: LatticeContext) -> np.ndarray:
    return np.empty((0, ctx.n_attrs, 2), dtype=np.int64)


def _enum_children_fn(ctx: LatticeContext, rows_all: np.ndarray):
    """Concretization children without element difference: the maximal
    elements of {x ≤ m | excl ≰ x}, scanned from the materialized lattice."""
    k = _backend.kernels()

    def children(m_row: np.ndarray, excl_row: np.ndarray) -> np.ndarray:
        below = rows_all[np.asarray(k.leq_rows(rows_all, m_row, ctx.kinds))]
        clean = below[~np.asarray(k.geq_rows(below, excl_row, ctx.kinds))]
        if clean.shape[0] == 0:
            return clean
        keep = k.maximal_filter(
            clean, excl_row[None, :, :], ctx.kinds, ctx.sizes, m_row, True
        )
        return clean[np.asarray(keep)]

    return children


def _enum_maximals_below(
    ctx: LatticeContext,
    rows_all: np.ndarray,
    bound_row: np.ndarray,
    pos_rows: np.ndarray,
    neg_rows: np.ndarray,
) -> np.ndarray:
    k = _backend.kernels()
    below = rows_all[np.asarray(k.leq_rows(rows_all, bound_row, ctx.kinds))]
    feasible = below[
        np.asarray(k.covers_any(below, pos_rows, ctx.kinds))
        & ~np.asarray(k.covers_any(below, neg_rows, ctx.kinds))
    ]
    if feasible.shape[0] == 0:
        return feasible
    keep = k.maximal_filter(feasible, neg_rows, ctx.kinds, ctx.sizes, bound_row, True)
    return feasible[np.asarray(keep)]


def _coverage_candidates(
    ctx: LatticeContext,
    pos_pairs: list[tuple[str, LatticeElement]],
    neg_atoms: Sequence[LatticeElement],
    mode: SynthesisMode,
    deadline: Optional[Deadline],
    rows_all: Optional[np.ndarray],
) -> tuple[list[frozenset], int]:
    """Coverage-set candidates feeding the cover solver, plus maximal count."""
    pos_rows = stack_rows([a for _, a in pos_pairs])
    neg_rows = stack_rows(tuple(neg_atoms)) if neg_atoms else _empty_rows(ctx)
    bound = join_rows(ctx, pos_rows)
    if mode.uses_difference:
        rows = find_maximals_rows(ctx, bound, pos_rows, neg_rows, deadline)
    else:
        rows = _enum_maximals_below(ctx, rows_all, bound, pos_rows, neg_rows)
    pos_ids = [pid for pid, _ in pos_pairs]
    masks = coverage_masks(ctx, pos_rows, rows)
    if mode.uses_abstraction:
        # only the small antichain of coverage bitmasks survives as objects
        chain = mask_antichain(masks)
        sets = [
            frozenset(pid for p, pid in enumerate(pos_ids) if (mask >> p) & 1)
            for mask in chain
        ]
        return sets, int(rows.shape[0])
    # no abstraction: one candidate per maximal, duplicates and all; the
    # cover solver sees the raw maximal population
    sets = []
    for mask in masks:
        if mask:
            sets.append(
                frozenset(pid for p, pid in enumerate(pos_ids) if (mask >> p) & 1)
            )
    return sets, int(rows.shape[0])


def synthesize_clauses(
    ctx: LatticeContext,
    positives: Sequence[PositiveArg],
    negatives: Sequence[LatticeElement],
    mode: SynthesisMode = SynthesisMode.FULL,
    deadline: Optional[Deadline] = None,
    cap: Optional[int] = None,
) -> tuple[list[LatticeElement], ClassStats]:
    """Optimal clause elements for one class, plus search statistics."""
    pos_pairs = _normalize_positives(positives)
    if not pos_pairs:
        raise LatticeDomainError("positives must be non-empty")

    rows_all = None
    if not mode.uses_difference:
        rows_all = materialize(ctx, cap)

    candidates, n_maximals = _coverage_candidates(
        ctx, pos_pairs, negatives, mode, deadline, rows_all
    )
    # Canonical candidate order: larger coverage first, then lexicographic.
    # Under this order the lex-smallest optimal cover uses only
    # inclusion-maximal coverage sets, so modes with and without the
    # antichain abstraction pick identical clause sets.
    candidates = sorted(candidates, key=lambda s: (-len(s), tuple(sorted(s))))
    universe = [pid for pid, _ in pos_pairs]
    instance = CoverInstance.build(universe, candidates)
    chosen = min_cover_indices(instance)

    atom_by_id = dict(pos_pairs)
    children_fn = None if mode.uses_difference else _enum_children_fn(ctx, rows_all)
    clauses = []
    for idx in chosen:
        delta_ids = sorted(candidates[idx])
        delta = [atom_by_id[pid] for pid in delta_ids]
        others = [atom for pid, atom in pos_pairs if pid not in candidates[idx]]
        clauses.append(
            concretize_representative(
                ctx, delta, others, tuple(negatives), deadline, children_fn
            )
        )
    stats = ClassStats(
        class_name=ctx.class_name,
        lattice_size=lattice_size(ctx),
        maximals_examined=n_maximals,
        representatives=len(candidates),
        cover_size=len(chosen),
    )
    return clauses, stats


def synthesize_predicate(
    ctx: LatticeContext,
    positives: Sequence[PositiveArg],
    negatives: Sequence[LatticeElement],
    mode: SynthesisMode = SynthesisMode.FULL,
    deadline: Optional[Deadline] = None,
    cap: Optional[int] = None,
) -> Predicate:
    """Disjunction of guarded clauses for one class."""
    clauses, _ = synthesize_clauses(ctx, positives, negatives, mode, deadline, cap)
    return or_join([element_to_predicate(ctx, m) for m in clauses])


def synthesize_by_class(
    spec: Specification,
    mode: SynthesisMode = SynthesisMode.FULL,
    deadline: Optional[Deadline] = None,
    cap: Optional[int] = None,
) -> tuple[Predicate, list[ClassStats]]:
    """Per-class synthesis joined by ∨, classes in name order."""
    by_class = partition_by_class(spec)
    all_clause_preds: list[Predicate] = []
    stats: list[ClassStats] = []
    for class_name in sorted(by_class):
        pos_objs, neg_objs = by_class[class_name]
        ctx = build_context(
            spec.dataset.schemas[class_name], tuple(pos_objs) + tuple(neg_objs)
        )
        pos_pairs = [(o.id, atom_of(ctx, o)) for o in pos_objs]
        neg_atoms = [atom_of(ctx, o) for o in neg_objs]
        clauses, class_stats = synthesize_clauses(
            ctx, pos_pairs, neg_atoms, mode, deadline, cap
        )
        all_clause_preds.extend(element_to_predicate(ctx, m) for m in clauses)
        stats.append(class_stats)
    return or_join(all_clause_preds), stats


def synthesize(
    dataset: Dataset,
    edit: EditRequest,
    mode: SynthesisMode = SynthesisMode.FULL,
    deadline: Optional[Deadline] = None,
    cap: Optional[int] = None,
) -> SynthesisReport:
    """End-to-end: labels → specification → optimal predicate → program."""
    t0 = time.perf_counter()
    spec = build_specification(dataset, edit)
    predicate, stats = synthesize_by_class(spec, mode, deadline, cap)
    program = build_program(edit.action, predicate)
    verdict = check_correctness(predicate, spec)
    if not verdict.ok:  # pragma: no cover - soundness invariant
        raise AssertionError(f"synthesized predicate violates the labels: {verdict}")
    return SynthesisReport(
        program=program,
        predicate=predicate,
        per_class=tuple(stats),
        wall_time_s=time.perf_counter() - t0,
        mode=mode,
        backend=_backend.backend_name(),
    )


# --- reference oracle ---------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    """Exhaustive ground truth for one class-level instance."""

    universe: tuple[str, ...]
    maximals: tuple[LatticeElement, ...]
    coverage_sets: tuple[frozenset, ...]  # aligned with maximals
    optimum_size: int
    optimal_families: tuple[frozenset, ...]  # frozensets of coverage frozensets

    def is_optimal_clause_set(self, clauses: Sequence[LatticeElement]) -> bool:
        if len(clauses) != self.optimum_size:
            return False
        maximal_set = set(self.maximals)
        return all(c in maximal_set for c in clauses)


def oracle_synthesize(
    ctx: LatticeContext,
    positives: Sequence[PositiveArg],
    negatives: Sequence[LatticeElement],
    cap: int = 100_000,
) -> OracleResult:
    """Enumerate the whole lattice and derive every feasible-region maximal
    and every optimal clause family.

    Independent of the search path: maximality is decided by dominance
    against already-found maximals while sweeping elements in decreasing
    size order (any strict dominator has strictly larger size), not by the
    production successor filter.
    """
    k = _backend.kernels()
    pos_pairs = _normalize_positives(positives)
    if not pos_pairs:
        raise LatticeDomainError("positives must be non-empty")
    pos_rows = stack_rows([a for _, a in pos_pairs])
    neg_rows = stack_rows(tuple(negatives)) if negatives else _empty_rows(ctx)

    rows = materialize(ctx, cap)
    feasible = rows[
        np.asarray(k.covers_any(rows, pos_rows, ctx.kinds))
        & ~np.asarray(k.covers_any(rows, neg_rows, ctx.kinds))
    ]

    maximal_rows = _dominance_maximals(ctx, feasible)
    pos_ids = [pid for pid, _ in pos_pairs]
    coverage = []
    if maximal_rows.shape[0]:
        matrix = np.asarray(k.leq_matrix(pos_rows, maximal_rows, ctx.kinds))
        for i in range(maximal_rows.shape[0]):
            coverage.append(
                frozenset(pid for p, pid in enumerate(pos_ids) if matrix[p, i])
            )

    universe = frozenset(pos_ids)
    distinct = sorted(set(coverage), key=lambda s: tuple(sorted(s)))
    optimum, families = _exhaustive_cover(universe, distinct)
    return OracleResult(
        universe=tuple(pos_ids),
        maximals=tuple(element_from_row(ctx, maximal_rows[i]) for i in range(maximal_rows.shape[0])),
        coverage_sets=tuple(coverage),
        optimum_size=optimum,
        optimal_families=tuple(families),
    )


def _dominance_maximals(ctx: LatticeContext, feasible: np.ndarray) -> np.ndarray:
    """Maximals of a feasible set by descending-size sweep + dominance."""
    if feasible.shape[0] == 0:
        return feasible
    k = _backend.kernels()
    cat = ctx.kinds == 0
    sizes = np.zeros(feasible.shape[0], dtype=np.int64)
    if cat.any():
        counts = np.bitwise_count(feasible[:, cat, 0].astype(np.uint64))
        sizes += counts.astype(np.int64).sum(axis=1)
    if (~cat).any():
        sizes += (feasible[:, ~cat, 1] - feasible[:, ~cat, 0]).sum(axis=1)
    order = np.argsort(-sizes, kind="stable")
    feasible = feasible[order]
    sizes = sizes[order]
    maximal_chunks = []
    start = 0
    n = feasible.shape[0]
    while start < n:
        stop = start
        while stop < n and sizes[stop] == sizes[start]:
            stop += 1
        group = feasible[start:stop]
        if maximal_chunks:
            current = np.concatenate(maximal_chunks, axis=0)
            dominated = np.asarray(k.leq_matrix(group, current, ctx.kinds)).any(axis=1)
            group = group[~dominated]
        if group.shape[0]:
            maximal_chunks.append(group)
        start = stop
    if not maximal_chunks:
        return feasible[:0]
    from .lattice import unique_rows

    return unique_rows(np.concatenate(maximal_chunks, axis=0))


def _exhaustive_cover(universe: frozenset, candidate_sets: list):
    """Smallest k plus every size-k family of coverage sets covering the
    universe; candidate lists here are tiny (≤ 2^|Π⁺| distinct sets)."""
    if not universe:
        return 0, [frozenset()]
    for k_size in range(1, len(candidate_sets) + 1):
        families = [
            frozenset(combo)
            for combo in combinations(candidate_sets, k_size)
            if frozenset().union(*combo) >= universe
        ]
        if families:
            return k_size, families
    return 0, []
