"""Exact minimum set cover over representatives.

The instance is the 0-1 integer program
    min Σ x_i   s.t.  x_i ∈ {0, 1},   Σ_{i : e ∈ S_i} x_i ≥ 1  for every
universe element e. Instances here are tiny (candidate count bounded by the
number of positive labels), so an embedded exact solver replaces an external
ILP package: iterative-deepening DFS over candidate indices with a greedy
upper bound, ceiling and max-disjoint lower bounds, and suffix-union
pruning. Among equal-size optima the lexicographically smallest index tuple
wins, which makes results deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import CoverInfeasibleError
from .reps import Representative


@dataclass(frozen=True)
class CoverInstance:
    universe: tuple[str, ...]
    candidates: tuple[Representative, ...]

    @staticmethod
    def build(universe, candidates) -> "CoverInstance":
        uni = tuple(dict.fromkeys(universe))
        cands = tuple(
            c if isinstance(c, Representative) else Representative(frozenset(c))
            for c in candidates
        )
        return CoverInstance(uni, cands)


def _greedy_upper(masks: Sequence[int], full: int) -> int:
    covered = 0
    count = 0
    while covered != full:
        best_gain, best = 0, -1
        for i, m in enumerate(masks):
            gain = (m & ~covered).bit_count()
            if gain > best_gain:
                best_gain, best = gain, i
        if best < 0:
            break
        covered |= masks[best]
        count += 1
    return count


def _disjoint_lower(masks: Sequence[int], remaining: int) -> int:
    """Greedy antichain of elements no candidate covers pairwise: each such
    element forces a distinct set, so the count lower-bounds the optimum."""
    forbidden = 0
    count = 0
    e = remaining
    while e:
        bit = e & -e
        e &= e - 1
        if forbidden & bit:
            continue
        count += 1
        for m in masks:
            if m & bit:
                forbidden |= m
    return count


def min_cover_indices(instance: CoverInstance) -> tuple[int, ...]:
    """Indices (ascending) of a minimum cover, lexicographically smallest."""
    universe = instance.universe
    n_elems = len(universe)
    pos = {e: i for i, e in enumerate(universe)}
    full = (1 << n_elems) - 1
    masks = []
    for cand in instance.candidates:
        m = 0
        for e in cand.covered:
            i = pos.get(e)
            if i is not None:
                m |= 1 << i
        masks.append(m)

    if n_elems == 0:
        return ()
    union_all = 0
    for m in masks:
        union_all |= m
    if union_all != full:
        missing = full & ~union_all
        raise CoverInfeasibleError(
            {universe[i] for i in range(n_elems) if (missing >> i) & 1}
        )

    # A candidate whose coverage is contained in an earlier candidate's can
    # never appear in the lex-smallest optimum (swapping it for the earlier
    # index keeps the cover and strictly lowers the sorted index tuple).
    usable = []
    for j, mj in enumerate(masks):
        if not any((mj & ~masks[i]) == 0 for i in usable):
            usable.append(j)

    # An element whose coverer set contains another element's is implied by
    # covering that other element; dropping it shrinks the universe only.
    coverers = {}
    for e_bit_index in range(n_elems):
        cov = 0
        for i in usable:
            if (masks[i] >> e_bit_index) & 1:
                cov |= 1 << i
        coverers[e_bit_index] = cov
    kept_elems = []
    for e in range(n_elems):
        dominated = any(
            f != e and (coverers[f] & ~coverers[e]) == 0 and
            (coverers[f] != coverers[e] or f < e)
            for f in range(n_elems)
        )
        if not dominated:
            kept_elems.append(e)
    target = 0
    for e in kept_elems:
        target |= 1 << e

    work = [(i, masks[i] & target) for i in usable]
    suffix_union = [0] * (len(work) + 1)
    for i in range(len(work) - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | work[i][1]

    max_size = max((m.bit_count() for _, m in work), default=0)
    remaining_bits = target.bit_count()
    lower = max(
        (remaining_bits + max_size - 1) // max_size if max_size else 0,
        _disjoint_lower([m for _, m in work], target),
    )
    upper = _greedy_upper([m for _, m in work], target)

    def dfs(start: int, covered: int, budget: int) -> Optional[tuple[int, ...]]:
        if covered == target:
            return ()
        if budget == 0 or start >= len(work):
            return None
        if covered | suffix_union[start] != target:
            return None
        need = (target & ~covered).bit_count()
        if need > budget * max_size:
            return None
        for i in range(start, len(work)):
            idx, m = work[i]
            if (m & ~covered) == 0:
                continue
            rest = dfs(i + 1, covered | m, budget - 1)
            if rest is not None:
                return (idx, *rest)
        return None

    for k in range(lower, upper + 1):
        found = dfs(0, 0, k)
        if found is not None:
            return found
    raise AssertionError("greedy upper bound unreachable")  # pragma: no cover


def min_cover(instance: CoverInstance) -> list[Representative]:
    """Minimum-cardinality candidate subset whose union covers the universe."""
    return [instance.candidates[i] for i in min_cover_indices(instance)]
