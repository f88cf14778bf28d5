"""Symbolic set/interval/product lattices.

A product-lattice element is either the shared bottom or a tuple of
per-attribute coordinates: a non-empty symbol subset (categorical) or a
contiguous run of grid atoms (numeric). Elements pack into (n_attrs, 2)
int64 rows (see _kernels_numpy for the layout), so bulk operations run as
array kernels and no Hasse diagram is ever materialized on production
paths; ``materialize`` exists for oracles and the enumeration ablations and
is guarded by a size cap.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _backend
from .dataset import ClassSchema, Number, ObjectRecord
from .errors import ContextTooLargeError, DatasetError, LatticeDomainError

MAX_DOMAIN = 63  # categorical coordinates are int64 bitmasks

DEFAULT_SIZE_CAP = 1_000_000
_SIZE_CAP_ENV = "LATTICE_SELECT_SIZE_CAP"


def size_cap() -> int:
    raw = os.environ.get(_SIZE_CAP_ENV)
    if raw is None:
        return DEFAULT_SIZE_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{_SIZE_CAP_ENV}={raw!r} is not an integer") from exc


@dataclass(frozen=True)
class Atom:
    """One indivisible sub-interval: an open gap or a degenerate point."""

    lo: Number
    lo_closed: bool
    hi: Number
    hi_closed: bool

    def __str__(self):
        l = "[" if self.lo_closed else "("
        r = "]" if self.hi_closed else ")"
        return f"{l}{_fmt_num(self.lo)},{_fmt_num(self.hi)}{r}"


@dataclass(frozen=True)
class CategoricalComponent:
    """Powerset lattice of a finite symbol domain."""

    domain: tuple[str, ...]

    def __post_init__(self):
        if len(self.domain) > MAX_DOMAIN:
            raise DatasetError(
                f"categorical domain of {len(self.domain)} symbols exceeds the "
                f"{MAX_DOMAIN}-symbol limit of the packed representation"
            )

    @property
    def full_mask(self) -> int:
        return (1 << len(self.domain)) - 1

    def mask_of(self, symbols: Iterable[str]) -> int:
        mask = 0
        for s in symbols:
            try:
                mask |= 1 << self.domain.index(s)
            except ValueError:
                raise LatticeDomainError(f"symbol {s!r} not in domain {list(self.domain)}")
        return mask

    def symbols_of(self, mask: int) -> tuple[str, ...]:
        return tuple(s for i, s in enumerate(self.domain) if (mask >> i) & 1)

    @property
    def nonbottom_count(self) -> int:
        return (1 << len(self.domain)) - 1


@dataclass(frozen=True)
class NumericGrid:
    """Grid points (labeled objects' values) within the schema bounds."""

    lower: Number
    upper: Number
    points: tuple[Number, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise LatticeDomainError(f"grid points not sorted/unique: {self.points}")
        if self.points and not (self.lower <= self.points[0] and self.points[-1] <= self.upper):
            raise LatticeDomainError(
                f"grid points {self.points} escape bounds [{self.lower}, {self.upper}]"
            )


@dataclass(frozen=True)
class IntervalComponent:
    """Interval lattice: contiguous runs of the grid's 2n+1 alternating atoms.

    Atoms alternate open gaps and degenerate closed points; the outermost
    gaps are closed at the schema bounds (which are attainable values,
    unlike the ±∞ they stand in for). Gap atoms that would be empty because
    a grid point sits exactly on a bound are dropped.
    """

    grid: NumericGrid
    atoms: tuple[Atom, ...]

    @staticmethod
    def build(grid: NumericGrid) -> "IntervalComponent":
        lo, hi, pts = grid.lower, grid.upper, grid.points
        if not pts:
            return IntervalComponent(grid, (Atom(lo, True, hi, True),))
        atoms: list[Atom] = []
        if lo < pts[0]:
            atoms.append(Atom(lo, True, pts[0], False))
        for i, p in enumerate(pts):
            atoms.append(Atom(p, True, p, True))
            if i + 1 < len(pts):
                atoms.append(Atom(p, False, pts[i + 1], False))
        if pts[-1] < hi:
            atoms.append(Atom(pts[-1], False, hi, True))
        return IntervalComponent(grid, tuple(atoms))

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    def point_atom(self, value: Number) -> int:
        """Atom index of a degenerate [value, value] atom."""
        for i, a in enumerate(self.atoms):
            if a.lo_closed and a.hi_closed and a.lo == value == a.hi:
                return i
        raise LatticeDomainError(
            f"value {value} is not a grid point of {[str(a) for a in self.atoms]} "
            f"(only labeled objects' values are on the grid)"
        )

    def run_bounds(self, lo_atom: int, hi_atom: int) -> Atom:
        """The single concrete interval denoted by a contiguous atom run."""
        first, last = self.atoms[lo_atom], self.atoms[hi_atom]
        return Atom(first.lo, first.lo_closed, last.hi, last.hi_closed)

    @property
    def nonbottom_count(self) -> int:
        t = self.atom_count
        return t * (t + 1) // 2


@dataclass(frozen=True, eq=False)
class LatticeContext:
    """Per-class component descriptors plus the packed kind/size arrays."""

    class_name: str
    attribute_names: tuple[str, ...]
    components: tuple[object, ...]
    kinds: np.ndarray  # int8, 0 categorical / 1 interval
    sizes: np.ndarray  # int64, domain size / atom count

    @property
    def n_attrs(self) -> int:
        return len(self.components)

    def top_row(self) -> np.ndarray:
        row = np.zeros((self.n_attrs, 2), dtype=np.int64)
        for i, comp in enumerate(self.components):
            if isinstance(comp, CategoricalComponent):
                row[i, 0] = comp.full_mask
            else:
                row[i, 1] = comp.atom_count - 1
        return row


def build_context(
    class_schema: ClassSchema, labeled_objects: Sequence[ObjectRecord]
) -> LatticeContext:
    """Lattice context for one class: schema domains plus grids collected
    from the labeled objects' numeric values."""
    for obj in labeled_objects:
        if obj.class_name != class_schema.class_name:
            raise LatticeDomainError(
                f"object {obj.id} has class {obj.class_name}, not {class_schema.class_name}"
            )
    components: list[object] = []
    kinds = np.empty(len(class_schema.attributes), dtype=np.int8)
    sizes = np.empty(len(class_schema.attributes), dtype=np.int64)
    for i, attr in enumerate(class_schema.attributes):
        if attr.is_categorical:
            comp: object = CategoricalComponent(attr.domain)
            kinds[i] = 0
            sizes[i] = len(attr.domain)
        else:
            values = sorted(
                {
                    obj.attributes[attr.name]
                    for obj in labeled_objects
                    if attr.lower <= obj.attributes[attr.name] <= attr.upper
                }
            )
            grid = NumericGrid(attr.lower, attr.upper, tuple(values))
            comp = IntervalComponent.build(grid)
            kinds[i] = 1
            sizes[i] = comp.atom_count
        components.append(comp)
    return LatticeContext(
        class_name=class_schema.class_name,
        attribute_names=class_schema.attribute_names,
        components=tuple(components),
        kinds=kinds,
        sizes=sizes,
    )


class LatticeElement:
    """Bottom, or a packed tuple of per-attribute coordinates."""

    __slots__ = ("ctx", "coords", "bottom", "_key")

    def __init__(self, ctx: LatticeContext, coords: Optional[np.ndarray], bottom: bool = False):
        self.ctx = ctx
        self.bottom = bottom
        if bottom:
            coords = np.zeros((ctx.n_attrs, 2), dtype=np.int64)
        else:
            coords = np.array(coords, dtype=np.int64)  # defensive copy, then frozen
            if coords.shape != (ctx.n_attrs, 2):
                raise LatticeDomainError(
                    f"coordinate arity {coords.shape} does not match context "
                    f"({ctx.n_attrs} attributes)"
                )
        coords.flags.writeable = False
        self.coords = coords
        self._key = (ctx.class_name, bottom, coords.tobytes())

    def __eq__(self, other):
        return isinstance(other, LatticeElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return format_element(self)

    def is_atom(self) -> bool:
        """All coordinates singleton symbols / single atoms."""
        if self.bottom:
            return False
        for i, comp in enumerate(self.ctx.components):
            if isinstance(comp, CategoricalComponent):
                m = int(self.coords[i, 0])
                if m == 0 or m & (m - 1):
                    return False
            else:
                if self.coords[i, 0] != self.coords[i, 1]:
                    return False
        return True


def bottom(ctx: LatticeContext) -> LatticeElement:
    return LatticeElement(ctx, None, bottom=True)


def top(ctx: LatticeContext) -> LatticeElement:
    return LatticeElement(ctx, ctx.top_row())


def element_from_row(ctx: LatticeContext, row: np.ndarray) -> LatticeElement:
    return LatticeElement(ctx, row)


def atom_of(ctx: LatticeContext, obj: ObjectRecord) -> LatticeElement:
    """The direct successor of bottom pinning the object's exact values."""
    row = np.zeros((ctx.n_attrs, 2), dtype=np.int64)
    for i, (name, comp) in enumerate(zip(ctx.attribute_names, ctx.components)):
        try:
            value = obj.attributes[name]
        except KeyError:
            raise LatticeDomainError(f"object {obj.id} lacks attribute {name!r}")
        if isinstance(comp, CategoricalComponent):
            row[i, 0] = comp.mask_of([value])
        else:
            idx = comp.point_atom(value)
            row[i, 0] = row[i, 1] = idx
    return LatticeElement(ctx, row)


def _check_pair(a: LatticeElement, b: LatticeElement) -> LatticeContext:
    if a.ctx.n_attrs != b.ctx.n_attrs or a.ctx.class_name != b.ctx.class_name:
        raise LatticeDomainError(
            f"elements from different contexts: {a.ctx.class_name}/{a.ctx.n_attrs} vs "
            f"{b.ctx.class_name}/{b.ctx.n_attrs}"
        )
    return a.ctx


def leq(a: LatticeElement, b: LatticeElement) -> bool:
    """Coordinate-wise order; bottom below everything."""
    ctx = _check_pair(a, b)
    if a.bottom:
        return True
    if b.bottom:
        return False
    k = _backend.kernels()
    return bool(k.leq_rows(a.coords[None, :, :], b.coords, ctx.kinds)[0])


def join(a: LatticeElement, b: LatticeElement) -> LatticeElement:
    """Least upper bound: union / interval hull per coordinate."""
    ctx = _check_pair(a, b)
    if a.bottom:
        return b
    if b.bottom:
        return a
    row = np.empty((ctx.n_attrs, 2), dtype=np.int64)
    cat = ctx.kinds == 0
    row[cat, 0] = a.coords[cat, 0] | b.coords[cat, 0]
    row[cat, 1] = 0
    iv = ~cat
    row[iv, 0] = np.minimum(a.coords[iv, 0], b.coords[iv, 0])
    row[iv, 1] = np.maximum(a.coords[iv, 1], b.coords[iv, 1])
    return LatticeElement(ctx, row)


def join_rows(ctx: LatticeContext, rows: np.ndarray) -> np.ndarray:
    """Join of many packed rows (empty input is rejected)."""
    if rows.shape[0] == 0:
        raise LatticeDomainError("join of zero elements")
    out = np.empty((ctx.n_attrs, 2), dtype=np.int64)
    cat = ctx.kinds == 0
    out[cat, 0] = np.bitwise_or.reduce(rows[:, cat, 0], axis=0)
    out[cat, 1] = 0
    iv = ~cat
    out[iv, 0] = rows[:, iv, 0].min(axis=0)
    out[iv, 1] = rows[:, iv, 1].max(axis=0)
    return out


def meet(a: LatticeElement, b: LatticeElement) -> LatticeElement:
    """Greatest lower bound; collapses to bottom when any coordinate empties."""
    ctx = _check_pair(a, b)
    if a.bottom or b.bottom:
        return bottom(ctx)
    row = np.empty((ctx.n_attrs, 2), dtype=np.int64)
    for i, comp in enumerate(ctx.components):
        if isinstance(comp, CategoricalComponent):
            m = a.coords[i, 0] & b.coords[i, 0]
            if m == 0:
                return bottom(ctx)
            row[i] = (m, 0)
        else:
            lo = max(a.coords[i, 0], b.coords[i, 0])
            hi = min(a.coords[i, 1], b.coords[i, 1])
            if lo > hi:
                return bottom(ctx)
            row[i] = (lo, hi)
    return LatticeElement(ctx, row)


def successors(ctx: LatticeContext, e: LatticeElement) -> list[LatticeElement]:
    """Direct successors: one minimal single-coordinate increase each.

    Bottom is rejected: its successor set is the full (possibly astronomical)
    atom set and no caller needs it.
    """
    if e.bottom:
        raise LatticeDomainError("successors of bottom are not enumerated")
    out = []
    for i, comp in enumerate(ctx.components):
        if isinstance(comp, CategoricalComponent):
            mask = int(e.coords[i, 0])
            for v in range(len(comp.domain)):
                if not (mask >> v) & 1:
                    row = e.coords.copy()
                    row[i, 0] = mask | (1 << v)
                    out.append(LatticeElement(ctx, row))
        else:
            lo, hi = int(e.coords[i, 0]), int(e.coords[i, 1])
            if lo > 0:
                row = e.coords.copy()
                row[i, 0] = lo - 1
                out.append(LatticeElement(ctx, row))
            if hi < comp.atom_count - 1:
                row = e.coords.copy()
                row[i, 1] = hi + 1
                out.append(LatticeElement(ctx, row))
    return out


def element_diff(ctx: LatticeContext, a: LatticeElement, b: LatticeElement) -> list[LatticeElement]:
    """Per-coordinate children of ``a`` that exclude the atom ``b``.

    Categorical coordinates drop the atom's symbol; interval coordinates
    split into the runs strictly before/after the atom (endpoints open at
    the subtracted grid point, otherwise the child would still cover it).
    Returns [a] untouched when b already escapes a: weakening candidates
    that exclude b would lose maximality.
    """
    if a.bottom:
        raise LatticeDomainError("element_diff of bottom")
    if not b.is_atom():
        raise LatticeDomainError(f"element_diff requires an atomic subtrahend, got {b!r}")
    _check_pair(a, b)
    k = _backend.kernels()
    rows = k.diff_round(a.coords[None, :, :], b.coords, ctx.kinds)
    return [LatticeElement(ctx, rows[i]) for i in range(rows.shape[0])]


def lattice_size(ctx: LatticeContext) -> int:
    """|L| = 1 + Π (component size − 1), as an exact big integer."""
    prod = 1
    for comp in ctx.components:
        prod *= comp.nonbottom_count
    return 1 + prod


def materialize(ctx: LatticeContext, cap: Optional[int] = None) -> np.ndarray:
    """All non-bottom elements as packed rows, canonical order; cap-guarded."""
    cap = size_cap() if cap is None else cap
    size = lattice_size(ctx)
    if size > cap:
        raise ContextTooLargeError(size, cap)
    comp_rows = []
    offsets = [0]
    for comp in ctx.components:
        if isinstance(comp, CategoricalComponent):
            vals = np.zeros((comp.nonbottom_count, 2), dtype=np.int64)
            vals[:, 0] = np.arange(1, comp.full_mask + 1, dtype=np.int64)
        else:
            t = comp.atom_count
            vals = np.array(
                [(lo, hi) for lo in range(t) for hi in range(lo, t)], dtype=np.int64
            ).reshape(-1, 2)
        comp_rows.append(vals)
        offsets.append(offsets[-1] + len(vals))
    comp_vals = np.concatenate(comp_rows, axis=0)
    comp_offsets = np.array(offsets, dtype=np.int64)
    k = _backend.kernels()
    return k.enumerate_product(comp_vals, comp_offsets, size - 1)


def stack_rows(elements: Sequence[LatticeElement]) -> np.ndarray:
    if not elements:
        return np.empty((0, 0, 2), dtype=np.int64)
    if any(e.bottom for e in elements):
        raise LatticeDomainError("cannot stack bottom elements")
    return np.stack([e.coords for e in elements])


def unique_rows(rows: np.ndarray) -> np.ndarray:
    """Deduplicate packed rows into canonical (lexicographic) order."""
    if rows.shape[0] <= 1:
        return rows
    n = rows.shape[1]
    flat = rows.reshape(rows.shape[0], n * 2)
    return np.unique(flat, axis=0).reshape(-1, n, 2)


def _fmt_num(x: Number) -> str:
    if isinstance(x, float) and x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return str(x)


def format_element(e: LatticeElement) -> str:
    """Canonical debug form, e.g. ``<{NoStyle,Stride}, (22,100]>``."""
    if e.bottom:
        return "<bottom>"
    parts = []
    for i, comp in enumerate(e.ctx.components):
        if isinstance(comp, CategoricalComponent):
            parts.append("{" + ",".join(comp.symbols_of(int(e.coords[i, 0]))) + "}")
        else:
            parts.append(str(comp.run_bounds(int(e.coords[i, 0]), int(e.coords[i, 1]))))
    return "<" + ", ".join(parts) + ">"
