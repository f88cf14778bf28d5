"""Jitted twin of _kernels_numpy; same API, explicit loops under @njit.

Compiled artifacts are cached on disk (cache=True), so only the first call
in a fresh environment pays LLVM time. Correctness parity with the numpy
backend is enforced by tests/test_backends.py.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True, inline="always")
def _leq_cell(a0, a1, b0, b1, kind):
    if kind == 0:
        return (a0 & ~b0) == 0
    return b0 <= a0 and a1 <= b1


@njit(cache=True)
def _leq_row(a, b, kinds):
    for c in range(a.shape[0]):
        if not _leq_cell(a[c, 0], a[c, 1], b[c, 0], b[c, 1], kinds[c]):
            return False
    return True


@njit(cache=True)
def leq_rows(rows, other, kinds):
    n_rows = rows.shape[0]
    out = np.empty(n_rows, dtype=np.bool_)
    for i in range(n_rows):
        out[i] = _leq_row(rows[i], other, kinds)
    return out


@njit(cache=True)
def geq_rows(rows, other, kinds):
    n_rows = rows.shape[0]
    out = np.empty(n_rows, dtype=np.bool_)
    for i in range(n_rows):
        out[i] = _leq_row(other, rows[i], kinds)
    return out


@njit(cache=True)
def leq_matrix(a, b, kinds):
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.bool_)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = _leq_row(a[i], b[j], kinds)
    return out


@njit(cache=True)
def covers_any(rows, atoms, kinds):
    n_rows = rows.shape[0]
    out = np.zeros(n_rows, dtype=np.bool_)
    for i in range(n_rows):
        for j in range(atoms.shape[0]):
            if _leq_row(atoms[j], rows[i], kinds):
                out[i] = True
                break
    return out


@njit(cache=True)
def diff_round(rows, neg, kinds):
    n_rows = rows.shape[0]
    n = rows.shape[1]
    cap = n_rows * 2 * n
    if cap < 1:
        cap = 1
    out = np.empty((cap, n, 2), dtype=np.int64)
    k = 0
    for i in range(n_rows):
        if not _leq_row(neg, rows[i], kinds):
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


@njit(cache=True, inline="always")
def _succ_covered(negs, failcount, failcoord, coord, succ_val, kinds):
    # A successor that re-grows coordinate ``coord`` by one step covers a
    # negative iff the negative already fit everywhere else and the grown
    # step is exactly its value (or the negative was fully covered already).
    for k in range(negs.shape[0]):
        if failcount[k] == 0:
            return True
        if failcount[k] == 1 and failcoord[k] == coord:
            if kinds[coord] == 0:
                if negs[k, coord, 0] == (np.int64(1) << succ_val):
                    return True
            else:
                if negs[k, coord, 0] == succ_val:
                    return True
    return False


@njit(cache=True)
def maximal_filter(rows, negs, kinds, sizes, bound, use_bound):
    # Bound exemptions are judged on the grown coordinate alone; callers
    # guarantee rows <= bound, making that equivalent to the successor
    # escaping the bound.
    n_rows = rows.shape[0]
    n = rows.shape[1]
    n_negs = negs.shape[0]
    keep = np.empty(n_rows, dtype=np.bool_)
    failcount = np.empty(n_negs, dtype=np.int64)
    failcoord = np.empty(n_negs, dtype=np.int64)
    for i in range(n_rows):
        row = rows[i]
        for k in range(n_negs):
            fc = 0
            where = -1
            for c in range(n):
                if not _leq_cell(
                    negs[k, c, 0], negs[k, c, 1], row[c, 0], row[c, 1], kinds[c]
                ):
                    fc += 1
                    where = c
                    if fc > 1:
                        break
            failcount[k] = fc
            failcoord[k] = where
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
                    if n_negs == 0 or not _succ_covered(
                        negs, failcount, failcoord, c, v, kinds
                    ):
                        ok = False
                        break
            else:
                lo = row[c, 0]
                hi = row[c, 1]
                if lo > 0:
                    sval = lo - 1
                    if not (use_bound and not (bound[c, 0] <= sval <= bound[c, 1])):
                        if n_negs == 0 or not _succ_covered(
                            negs, failcount, failcoord, c, sval, kinds
                        ):
                            ok = False
                if ok and hi < sizes[c] - 1:
                    sval = hi + 1
                    if not (use_bound and not (bound[c, 0] <= sval <= bound[c, 1])):
                        if n_negs == 0 or not _succ_covered(
                            negs, failcount, failcoord, c, sval, kinds
                        ):
                            ok = False
        keep[i] = ok
    return keep


@njit(cache=True)
def enumerate_product(comp_vals, comp_offsets, total):
    n = comp_offsets.shape[0] - 1
    out = np.empty((total, n, 2), dtype=np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for r in range(total):
        for c in range(n):
            out[r, c, 0] = comp_vals[comp_offsets[c] + idx[c], 0]
            out[r, c, 1] = comp_vals[comp_offsets[c] + idx[c], 1]
        for c in range(n - 1, -1, -1):
            idx[c] += 1
            if idx[c] < comp_offsets[c + 1] - comp_offsets[c]:
                break
            idx[c] = 0
    return out


def warmup():
    """Trigger (or load from cache) compilation of every kernel."""
    kinds = np.array([0, 1], dtype=np.int8)
    sizes = np.array([2, 3], dtype=np.int64)
    rows = np.array([[[3, 0], [0, 2]], [[1, 0], [1, 1]]], dtype=np.int64)
    atom = np.array([[1, 0], [1, 1]], dtype=np.int64)
    leq_rows(rows, atom, kinds)
    geq_rows(rows, atom, kinds)
    leq_matrix(rows, rows, kinds)
    covers_any(rows, rows[:1], kinds)
    diff_round(rows, atom, kinds)
    maximal_filter(rows, rows[1:], kinds, sizes, rows[0], True)
    offs = np.array([0, 2], dtype=np.int64)
    enumerate_product(rows[:, 0, :].copy(), offs, 2)
