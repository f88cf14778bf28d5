"""Maximal-element search guided by element difference.

Candidates start at the search bound; each negative atom is subtracted from
every candidate (per-coordinate children), children that no longer cover a
positive are dropped, and after every round only candidates that are maximal
below the bound survive. The final set is exactly the maximal elements of
the bounded feasible region, in canonical row order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _backend
from .errors import LatticeDomainError, SynthesisTimeout
from .lattice import (
    LatticeContext,
    LatticeElement,
    element_from_row,
    stack_rows,
    top,
    unique_rows,
)


class InfeasibleRepresentativeError(Exception):
    """Concretization failed even after relaxing the exclusion set.

    Unreachable when the delta came from find_representatives; raised rather
    than asserted so miscalls surface with context.
    """


class Deadline:
    """Cooperative cancellation: wall-clock budget plus an optional abort hook."""

    __slots__ = ("expires_at", "abort_check")

    def __init__(self, seconds: Optional[float] = None, abort_check: Optional[Callable] = None):
        self.expires_at = None if seconds is None else time.monotonic() + seconds
        self.abort_check = abort_check

    def check(self):
        if self.expires_at is not None and time.monotonic() > self.expires_at:
            raise SynthesisTimeout("synthesis deadline expired")
        if self.abort_check is not None:
            self.abort_check()


def _check_atoms(ctx: LatticeContext, atoms: Sequence[LatticeElement], what: str):
    for a in atoms:
        if a.ctx.class_name != ctx.class_name or a.ctx.n_attrs != ctx.n_attrs:
            raise LatticeDomainError(f"{what} atom {a!r} belongs to another context")
        if not a.is_atom():
            raise LatticeDomainError(f"{what} element {a!r} is not an atom")


@dataclass(frozen=True)
class SearchProblem:
    """Bounded search instance: find maximals below ``bound`` covering a
    positive and no negative."""

    ctx: LatticeContext
    bound: LatticeElement
    positives: tuple[LatticeElement, ...]
    negatives: tuple[LatticeElement, ...]

    def __post_init__(self):
        if self.bound.bottom:
            raise LatticeDomainError("search bound must not be bottom")
        _check_atoms(self.ctx, self.positives, "positive")
        _check_atoms(self.ctx, self.negatives, "negative")
        if set(self.positives) & set(self.negatives):
            raise LatticeDomainError("positive and negative atoms overlap")


def find_maximals_rows(
    ctx: LatticeContext,
    bound_row: np.ndarray,
    pos_rows: np.ndarray,
    neg_rows: np.ndarray,
    deadline: Optional[Deadline] = None,
    trace: Optional[list] = None,
) -> np.ndarray:
    """Array-level search; returns packed rows in canonical order.

    With ``trace`` a list, the working set after each negative is appended
    (testing hook for the loop invariants).
    """
    k = _backend.kernels()
    current = bound_row[None, :, :].copy()
    if neg_rows.shape[0] == 0:
        return current
    for j in range(neg_rows.shape[0]):
        if deadline is not None:
            deadline.check()
        children = k.diff_round(current, neg_rows[j], ctx.kinds)
        if children.shape[0]:
            children = children[np.asarray(k.covers_any(children, pos_rows, ctx.kinds))]
        if children.shape[0]:
            children = unique_rows(children)
            keep = k.maximal_filter(
                children, neg_rows, ctx.kinds, ctx.sizes, bound_row, True
            )
            children = children[np.asarray(keep)]
        current = children
        if trace is not None:
            trace.append(current.copy())
        if current.shape[0] == 0:
            return current
    return current


def find_maximals(
    problem: SearchProblem, deadline: Optional[Deadline] = None
) -> list[LatticeElement]:
    """Maximals of the feasible region below the bound (Deadline-aware)."""
    ctx = problem.ctx
    pos_rows = stack_rows(problem.positives)
    if pos_rows.shape[0] == 0:
        pos_rows = np.empty((0, ctx.n_attrs, 2), dtype=np.int64)
    neg_rows = stack_rows(problem.negatives)
    if neg_rows.shape[0] == 0:
        neg_rows = np.empty((0, ctx.n_attrs, 2), dtype=np.int64)
    rows = find_maximals_rows(ctx, problem.bound.coords, pos_rows, neg_rows, deadline)
    return [element_from_row(ctx, rows[i]) for i in range(rows.shape[0])]


def is_maximal(
    ctx: LatticeContext, m: LatticeElement, negatives: Sequence[LatticeElement]
) -> bool:
    """True iff every successor of ``m`` covers at least one negative."""
    if m.bottom:
        raise LatticeDomainError("is_maximal of bottom")
    _check_atoms(ctx, negatives, "negative")
    k = _backend.kernels()
    neg_rows = stack_rows(tuple(negatives))
    if neg_rows.shape[0] == 0:
        neg_rows = np.empty((0, ctx.n_attrs, 2), dtype=np.int64)
    keep = k.maximal_filter(
        m.coords[None, :, :], neg_rows, ctx.kinds, ctx.sizes, m.coords, False
    )
    return bool(keep[0])


def diff_children_fn(ctx: LatticeContext) -> Callable:
    """Default concretization children: element difference via the kernel."""
    k = _backend.kernels()

    def children(m_row: np.ndarray, excl_row: np.ndarray) -> np.ndarray:
        return k.diff_round(m_row[None, :, :], excl_row, ctx.kinds)

    return children


def _dfs_concretize(
    ctx: LatticeContext,
    delta_rows: np.ndarray,
    exclusion_rows: np.ndarray,
    children_fn: Callable,
    deadline: Optional[Deadline],
) -> Optional[np.ndarray]:
    k = _backend.kernels()
    n_excl = exclusion_rows.shape[0]
    stack: list[tuple[np.ndarray, int]] = [(ctx.top_row(), 0)]
    while stack:
        if deadline is not None:
            deadline.check()
        row, depth = stack.pop()
        if depth == n_excl:
            keep = k.maximal_filter(
                row[None, :, :], exclusion_rows, ctx.kinds, ctx.sizes, row, False
            )
            if keep[0]:
                return row
            continue
        children = children_fn(row, exclusion_rows[depth])
        if children.shape[0] == 0:
            continue
        covers_all = np.asarray(
            k.leq_matrix(delta_rows, children, ctx.kinds)
        ).all(axis=0)
        children = unique_rows(children[covers_all])
        # canonical order; reversed push so the smallest child is explored first
        for i in range(children.shape[0] - 1, -1, -1):
            stack.append((children[i], depth + 1))
    return None


def concretize_representative(
    ctx: LatticeContext,
    delta: Sequence[LatticeElement],
    other_positives: Sequence[LatticeElement],
    negatives: Sequence[LatticeElement],
    deadline: Optional[Deadline] = None,
    children_fn: Optional[Callable] = None,
) -> LatticeElement:
    """Depth-first concretization of a representative into one maximal.

    Searches from top for the first (canonical order) element that covers
    every atom of ``delta``, excludes negatives ∪ other positives, and is
    maximal w.r.t. that exclusion set. If the strict exclusion set is
    infeasible, retries excluding negatives only — correctness never requires
    excluding positives, and the antichain construction is expected to make
    the strict pass succeed.
    """
    if not delta:
        raise LatticeDomainError("delta must be non-empty")
    _check_atoms(ctx, delta, "delta")
    _check_atoms(ctx, other_positives, "positive")
    _check_atoms(ctx, negatives, "negative")
    if children_fn is None:
        children_fn = diff_children_fn(ctx)
    delta_rows = stack_rows(tuple(delta))
    neg_rows = stack_rows(tuple(negatives))
    if neg_rows.shape[0] == 0:
        neg_rows = np.empty((0, ctx.n_attrs, 2), dtype=np.int64)
    other_rows = stack_rows(tuple(other_positives))
    if other_rows.shape[0] == 0:
        other_rows = np.empty((0, ctx.n_attrs, 2), dtype=np.int64)

    strict = np.concatenate([neg_rows, other_rows], axis=0)
    row = _dfs_concretize(ctx, delta_rows, strict, children_fn, deadline)
    if row is None and other_rows.shape[0]:
        row = _dfs_concretize(ctx, delta_rows, neg_rows, children_fn, deadline)
    if row is None:
        raise InfeasibleRepresentativeError(
            f"no maximal covers {[repr(d) for d in delta]} while excluding the negatives"
        )
    return element_from_row(ctx, row)
