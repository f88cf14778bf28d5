"""Pure-numpy kernels over packed lattice coordinates.

Element layout: one row per element, shape (n_attrs, 2) int64.
  - categorical coordinate: [bitmask over domain indices, 0]
  - interval coordinate:    [first atom index, last atom index]
kinds[c] is 0 for categorical, 1 for interval; sizes[c] is the domain size
or the atom count. This module is the readable reference; _kernels_numba is
the jitted twin with the same API, selected via LATTICE_SELECT_BACKEND.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_CHUNK_CELLS = 8_000_000  # cap on NA*NB*n temporaries in leq_matrix


def _leq_coord(a, b, kinds):
    """Coordinate-wise ≤ with broadcasting; trailing dims (..., n, 2)."""
    subset = (a[..., 0] & ~b[..., 0]) == 0
    within = (b[..., 0] <= a[..., 0]) & (a[..., 1] <= b[..., 1])
    return np.where(kinds == 0, subset, within)


def leq_rows(rows, other, kinds):
    """rows[i] ≤ other, for every row."""
    return _leq_coord(rows, other[None, :, :], kinds).all(axis=-1)


def geq_rows(rows, other, kinds):
    """other ≤ rows[i], for every row."""
    return _leq_coord(other[None, :, :], rows, kinds).all(axis=-1)


def leq_matrix(a, b, kinds):
    """Pairwise a[i] ≤ b[j], shape (len(a), len(b))."""
    na, n = a.shape[0], a.shape[1]
    nb = b.shape[0]
    out = np.empty((na, nb), dtype=bool)
    if na == 0 or nb == 0:
        return out
    step = max(1, _CHUNK_CELLS // max(1, nb * n))
    for start in range(0, na, step):
        stop = min(na, start + step)
        block = _leq_coord(a[start:stop, None, :, :], b[None, :, :, :], kinds)
        out[start:stop] = block.all(axis=-1)
    return out


def covers_any(rows, atoms, kinds):
    """∃ atom ≤ rows[i], for every row."""
    if atoms.shape[0] == 0:
        return np.zeros(rows.shape[0], dtype=bool)
    return leq_matrix(atoms, rows, kinds).any(axis=0)


def diff_round(rows, neg, kinds):
    """One search-round expansion: subtract the atom ``neg`` from every row.

    Rows not covering ``neg`` pass through unchanged; covered rows are
    replaced by their per-coordinate difference children (categorical: mask
    minus the atom's bit; interval: the runs strictly before/after the atom).
    """
    n_rows, n, _ = rows.shape
    out = np.empty((max(1, n_rows * 2 * n), n, 2), dtype=np.int64)
    covered = geq_rows(rows, neg, kinds)
    k = 0
    for i in range(n_rows):
        if not covered[i]:
            out[k] = rows[i]
            k += 1
            continue
        for c in range(n):
            if kinds[c] == 0:
                rest = rows[i, c, 0] & ~neg[c, 0]
                if rest != 0:
                    out[k] = rows[i]
                    out[k, c, 0] = rest
                    k += 1
            else:
                p = neg[c, 0]
                if p - 1 >= rows[i, c, 0]:
                    out[k] = rows[i]
                    out[k, c, 1] = p - 1
                    k += 1
                if p + 1 <= rows[i, c, 1]:
                    out[k] = rows[i]
                    out[k, c, 0] = p + 1
                    k += 1
    return out[:k].copy()


def maximal_filter(rows, negs, kinds, sizes, bound, use_bound):
    """keep[i] ⟺ every successor of rows[i] covers a negative.

    With use_bound, successors escaping ``bound`` are exempt (maximality
    relative to the region below the bound).
    """
    n_rows, n, _ = rows.shape
    n_negs = negs.shape[0]
    keep = np.empty(n_rows, dtype=bool)
    for i in range(n_rows):
        row = rows[i]
        if n_negs:
            cov = _leq_coord(negs, row[None, :, :], kinds)  # (K, n)
            miss = ~cov
            failcount = miss.sum(axis=1)
            failcoord = miss.argmax(axis=1)
        ok = True
        for c in range(n):
            if not ok:
                break
            if kinds[c] == 0:
                mask = row[c, 0]
                for v in range(sizes[c]):
                    if (mask >> v) & 1:
                        continue
                    if use_bound and not (bound[c, 0] >> v) & 1:
                        continue
                    if n_negs == 0:
                        ok = False
                        break
                    hit = (failcount == 0) | (
                        (failcount == 1) & (failcoord == c) & (negs[:, c, 0] == (1 << v))
                    )
                    if not hit.any():
                        ok = False
                        break
            else:
                lo, hi = row[c, 0], row[c, 1]
                for sval, valid in ((lo - 1, lo > 0), (hi + 1, hi < sizes[c] - 1)):
                    if not valid:
                        continue
                    if use_bound and not (bound[c, 0] <= sval <= bound[c, 1]):
                        continue
                    if n_negs == 0:
                        ok = False
                        break
                    hit = (failcount == 0) | (
                        (failcount == 1) & (failcoord == c) & (negs[:, c, 0] == sval)
                    )
                    if not hit.any():
                        ok = False
                        break
        keep[i] = ok
    return keep


def enumerate_product(comp_vals, comp_offsets, total):
    """Materialize all non-bottom product elements in canonical order.

    comp_vals stacks each component's element rows ((mask,0) or (lo,hi));
    comp_offsets[c]..comp_offsets[c+1] delimits component c. The last
    coordinate varies fastest, so rows come out lexicographically sorted by
    component-element index.
    """
    n = comp_offsets.shape[0] - 1
    counts = np.diff(comp_offsets)
    out = np.empty((total, n, 2), dtype=np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for r in range(total):
        for c in range(n):
            out[r, c] = comp_vals[comp_offsets[c] + idx[c]]
        for c in range(n - 1, -1, -1):
            idx[c] += 1
            if idx[c] < counts[c]:
                break
            idx[c] = 0
    return out


def warmup():
    """No-op for API parity with the jitted backend."""
