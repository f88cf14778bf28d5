"""Representatives: coverage-set abstraction of equivalent maximals.

A representative stands for every maximal that covers the same positive
objects; maintaining only the inclusion-maximal coverage sets (an antichain)
keeps the optimizer input tiny even when one positive has thousands of
maximals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .errors import LatticeDomainError
from .lattice import LatticeContext, LatticeElement, join_rows, stack_rows
from .search import Deadline, find_maximals_rows


@dataclass(frozen=True)
class Representative:
    """The set of positive ids some maximal covers."""

    covered: frozenset[str]

    def __post_init__(self):
        if not self.covered:
            raise LatticeDomainError("representative must cover at least one positive")


@dataclass(frozen=True)
class RepresentativeSearch:
    representatives: tuple[Representative, ...]
    maximals_examined: int


def antichain_insert(chain: list[frozenset], s: frozenset) -> None:
    """Keep only inclusion-maximal sets; drops s if some member contains it."""
    for member in chain:
        if s <= member:
            return
    chain[:] = [member for member in chain if not member < s]
    chain.append(s)


def coverage_masks(ctx: LatticeContext, pos_rows: np.ndarray, rows: np.ndarray) -> list[int]:
    """Per-row bitmask over positive indices (bit p set iff pos p ≤ row)."""
    if rows.shape[0] == 0:
        return []
    k = _backend.kernels()
    covered = np.asarray(k.leq_matrix(pos_rows, rows, ctx.kinds))  # (P, M)
    n_pos = pos_rows.shape[0]
    if n_pos <= 63:
        weights = (np.int64(1) << np.arange(n_pos, dtype=np.int64))
        packed = covered.T.astype(np.int64) @ weights
        return [int(m) for m in packed]
    out = []
    for i in range(rows.shape[0]):
        mask = 0
        for p in range(n_pos):
            if covered[p, i]:
                mask |= 1 << p
        out.append(mask)
    return out


def mask_antichain(masks) -> list[int]:
    """Inclusion-maximal bitmasks, insertion-streamed; the chain stays small
    so every insert is a handful of word operations."""
    chain: list[int] = []
    for mask in masks:
        if not mask:
            continue
        if any(mask | member == member for member in chain):
            continue
        chain[:] = [member for member in chain if member | mask != mask]
        chain.append(mask)
    return chain


def find_representatives(
    ctx: LatticeContext,
    positives: Sequence[tuple[str, LatticeElement]],
    negatives: Sequence[LatticeElement],
    deadline: Optional[Deadline] = None,
) -> RepresentativeSearch:
    """Antichain of coverage sets over the maximals below ⊔Π⁺.

    Maximals are consumed row-by-row out of the search result; only their
    coverage bitmasks survive into the antichain, and just the final chain
    is expanded to id sets."""
    if not positives:
        raise LatticeDomainError("positives must be non-empty")
    pos_ids = [pid for pid, _ in positives]
    pos_rows = stack_rows([atom for _, atom in positives])
    neg_rows = stack_rows(tuple(negatives))
    if neg_rows.shape[0] == 0:
        neg_rows = np.empty((0, ctx.n_attrs, 2), dtype=np.int64)
    bound = join_rows(ctx, pos_rows)
    rows = find_maximals_rows(ctx, bound, pos_rows, neg_rows, deadline)
    chain = mask_antichain(coverage_masks(ctx, pos_rows, rows))
    sets = [
        frozenset(pid for p, pid in enumerate(pos_ids) if (mask >> p) & 1)
        for mask in chain
    ]
    return RepresentativeSearch(
        representatives=tuple(Representative(s) for s in sets),
        maximals_examined=int(rows.shape[0]),
    )
