"""Data model and ingestion: schemas, objects, labels, specifications.

Objects arrive as declarative attribute-map datasets (JSON); there is no
vision layer here. All types are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .errors import DatasetError, SpecificationError

Number = Union[int, float]
Value = Union[str, int, float]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

CATEGORICAL = "categorical"
NUMERIC = "numeric"

# Pseudo-attribute injected by identity_fallback for datasets whose objects
# are not distinguishable by their declared attributes.
IDENTITY_ATTRIBUTE = "object_id"


def _check_ident(name: str, what: str) -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise DatasetError(f"{what} {name!r} is not a bare identifier")
    return name


@dataclass(frozen=True)
class AttributeSchema:
    """One attribute: a finite symbol domain or a bounded numeric range."""

    name: str
    kind: str
    domain: tuple[str, ...] = ()
    lower: Optional[Number] = None
    upper: Optional[Number] = None

    def __post_init__(self):
        _check_ident(self.name, "attribute name")
        if self.kind == CATEGORICAL:
            if not self.domain:
                raise DatasetError(f"attribute {self.name}: empty categorical domain")
            if len(set(self.domain)) != len(self.domain):
                raise DatasetError(f"attribute {self.name}: duplicate domain symbols")
            for sym in self.domain:
                _check_ident(sym, f"attribute {self.name} symbol")
        elif self.kind == NUMERIC:
            if self.lower is None or self.upper is None:
                raise DatasetError(f"attribute {self.name}: numeric bounds required")
            if not self.lower < self.upper:
                raise DatasetError(
                    f"attribute {self.name}: lower bound {self.lower} must be < upper "
                    f"bound {self.upper}"
                )
        else:
            raise DatasetError(f"attribute {self.name}: unknown kind {self.kind!r}")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    def validate_value(self, value: Value, owner: str) -> None:
        if self.is_categorical:
            if value not in self.domain:
                raise DatasetError(
                    f"object {owner}: {self.name}={value!r} not in domain {list(self.domain)}"
                )
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DatasetError(f"object {owner}: {self.name}={value!r} is not a number")
            if not (self.lower <= value <= self.upper):
                raise DatasetError(
                    f"object {owner}: {self.name}={value} outside bounds "
                    f"[{self.lower}, {self.upper}]"
                )


@dataclass(frozen=True)
class ClassSchema:
    """Attribute universe of one object class; attribute order is canonical."""

    class_name: str
    attributes: tuple[AttributeSchema, ...]

    def __post_init__(self):
        _check_ident(self.class_name, "class name")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise DatasetError(f"class {self.class_name}: duplicate attribute names")

    def attribute(self, name: str) -> AttributeSchema:
        for a in self.attributes:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)


@dataclass(frozen=True)
class Region:
    """Axis-aligned pixel box; the click-resolution target."""

    x: Number
    y: Number
    w: Number
    h: Number

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise DatasetError(f"region with negative extent: {self}")

    def contains(self, px: Number, py: Number) -> bool:
        return self.x <= px <= self.x + self.w and self.y <= py <= self.y + self.h

    @property
    def area(self) -> Number:
        return self.w * self.h


@dataclass(frozen=True)
class ObjectRecord:
    """One identified object: id, class, region, attribute map."""

    id: str
    class_name: str
    region: Region
    attributes: Mapping[str, Value]

    def attribute_tuple(self, schema: ClassSchema) -> tuple[Value, ...]:
        return tuple(self.attributes[a.name] for a in schema.attributes)


@dataclass(frozen=True)
class Dataset:
    """All objects plus their class schemas."""

    schemas: Mapping[str, ClassSchema]
    objects: tuple[ObjectRecord, ...]
    image_url: Optional[str] = None

    def __post_init__(self):
        seen_ids = set()
        maps_by_class: dict[str, dict[tuple, str]] = {}
        for obj in self.objects:
            if obj.id in seen_ids:
                raise DatasetError(f"duplicate object id {obj.id!r}")
            seen_ids.add(obj.id)
            schema = self.schemas.get(obj.class_name)
            if schema is None:
                raise DatasetError(f"object {obj.id}: no schema for class {obj.class_name!r}")
            extra = set(obj.attributes) - set(schema.attribute_names)
            if extra:
                raise DatasetError(f"object {obj.id}: undeclared attributes {sorted(extra)}")
            for attr in schema.attributes:
                if attr.name not in obj.attributes:
                    raise DatasetError(f"object {obj.id}: missing attribute {attr.name!r}")
                attr.validate_value(obj.attributes[attr.name], obj.id)
            key = obj.attribute_tuple(schema)
            other = maps_by_class.setdefault(obj.class_name, {}).get(key)
            if other is not None:
                raise DatasetError(
                    f"objects {other!r} and {obj.id!r} of class {obj.class_name} have "
                    f"identical attribute maps; objects must be uniquely identified by "
                    f"their attributes (reload with identity_fallback=True to inject a "
                    f"distinguishing '{IDENTITY_ATTRIBUTE}' attribute)"
                )
            maps_by_class[obj.class_name][key] = obj.id

    def object_by_id(self, object_id: str) -> ObjectRecord:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise SpecificationError(f"unknown object id {object_id!r}")

    @property
    def object_ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.objects)


@dataclass(frozen=True)
class LabelSet:
    """Raw labels as uploaded: explicit object ids and/or click points."""

    positive_ids: tuple[str, ...] = ()
    negative_ids: tuple[str, ...] = ()
    positive_clicks: tuple[tuple[Number, Number], ...] = ()
    negative_clicks: tuple[tuple[Number, Number], ...] = ()


@dataclass(frozen=True)
class EditRequest:
    """A requested edit: the action plus positive/negative labels."""

    action: object  # dsl.Action; kept opaque here to avoid a module cycle
    labels: LabelSet


@dataclass(frozen=True)
class Specification:
    """(Π, Π⁺, Π⁻): all objects plus disjoint, non-empty-positive label sets."""

    dataset: Dataset
    positive_ids: frozenset[str]
    negative_ids: frozenset[str]

    def __post_init__(self):
        known = set(self.dataset.object_ids)
        unknown = (self.positive_ids | self.negative_ids) - known
        if unknown:
            raise SpecificationError(f"labels reference unknown objects: {sorted(unknown)}")
        overlap = self.positive_ids & self.negative_ids
        if overlap:
            raise SpecificationError(
                f"objects labeled both positive and negative: {sorted(overlap)}"
            )
        if not self.positive_ids:
            raise SpecificationError("at least one positive object is required")

    @property
    def positives(self) -> tuple[ObjectRecord, ...]:
        return tuple(o for o in self.dataset.objects if o.id in self.positive_ids)

    @property
    def negatives(self) -> tuple[ObjectRecord, ...]:
        return tuple(o for o in self.dataset.objects if o.id in self.negative_ids)

    @property
    def neutral_ids(self) -> frozenset[str]:
        return frozenset(self.dataset.object_ids) - self.positive_ids - self.negative_ids


def _parse_attribute(spec: dict) -> AttributeSchema:
    if not isinstance(spec, dict) or "name" not in spec or "kind" not in spec:
        raise DatasetError(f"malformed attribute entry: {spec!r}")
    kind = spec["kind"]
    if kind == CATEGORICAL:
        return AttributeSchema(spec["name"], CATEGORICAL, domain=tuple(spec.get("domain", ())))
    if kind == NUMERIC:
        if "min" not in spec or "max" not in spec:
            raise DatasetError(f"attribute {spec['name']}: numeric needs min and max")
        return AttributeSchema(spec["name"], NUMERIC, lower=spec["min"], upper=spec["max"])
    raise DatasetError(f"attribute {spec['name']}: unknown kind {kind!r}")


def parse_class_schema(class_name: str, spec: dict) -> ClassSchema:
    attrs = spec.get("attributes")
    if not isinstance(attrs, list):
        raise DatasetError(f"class {class_name}: 'attributes' must be a list")
    return ClassSchema(class_name, tuple(_parse_attribute(a) for a in attrs))


def load_dataset(source, identity_fallback: bool = False) -> Dataset:
    """Parse and validate the dataset JSON format.

    ``source`` may be bytes, text, a file-like object, or an already-decoded
    dict. Canonical attribute order is declaration order. With
    ``identity_fallback`` a categorical ``object_id`` attribute is appended to
    every class so objects with otherwise identical attribute maps validate.
    """
    if isinstance(source, dict):
        data = source
    else:
        if hasattr(source, "read"):
            source = source.read()
        if isinstance(source, bytes):
            source = source.decode("utf-8")
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"dataset is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "schemas" not in data or "objects" not in data:
        raise DatasetError("dataset JSON must have 'schemas' and 'objects' keys")

    schemas = {
        name: parse_class_schema(name, spec) for name, spec in data["schemas"].items()
    }
    objects = []
    for entry in data["objects"]:
        try:
            region = Region(**entry["region"])
            obj = ObjectRecord(
                id=str(entry["id"]),
                class_name=entry["class"],
                region=region,
                attributes=dict(entry["attributes"]),
            )
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"malformed object entry {entry!r}: {exc}") from exc
        objects.append(obj)

    if identity_fallback:
        schemas, objects = _inject_identity(schemas, objects)
    return Dataset(schemas=schemas, objects=tuple(objects), image_url=data.get("image_url"))


def _inject_identity(schemas, objects):
    ids_by_class: dict[str, list[str]] = {}
    for obj in objects:
        ids_by_class.setdefault(obj.class_name, []).append(obj.id)
    new_schemas = {}
    for name, schema in schemas.items():
        ids = tuple(ids_by_class.get(name, ()))
        if not ids:
            new_schemas[name] = schema
            continue
        if IDENTITY_ATTRIBUTE in schema.attribute_names:
            raise DatasetError(
                f"class {name} already declares {IDENTITY_ATTRIBUTE!r}; cannot inject fallback"
            )
        for oid in ids:
            _check_ident(oid, "object id (identity fallback requires identifier ids)")
        extra = AttributeSchema(IDENTITY_ATTRIBUTE, CATEGORICAL, domain=ids)
        new_schemas[name] = ClassSchema(name, schema.attributes + (extra,))
    new_objects = [
        ObjectRecord(
            o.id, o.class_name, o.region, {**o.attributes, IDENTITY_ATTRIBUTE: o.id}
        )
        for o in objects
    ]
    return new_schemas, new_objects


def serialize_dataset(dataset: Dataset) -> dict:
    """Inverse of load_dataset: load(serialize(d)) reproduces d."""
    out_schemas = {}
    for name, schema in dataset.schemas.items():
        attrs = []
        for a in schema.attributes:
            if a.is_categorical:
                attrs.append({"name": a.name, "kind": CATEGORICAL, "domain": list(a.domain)})
            else:
                attrs.append({"name": a.name, "kind": NUMERIC, "min": a.lower, "max": a.upper})
        out_schemas[name] = {"attributes": attrs}
    out_objects = [
        {
            "id": o.id,
            "class": o.class_name,
            "region": {"x": o.region.x, "y": o.region.y, "w": o.region.w, "h": o.region.h},
            "attributes": dict(o.attributes),
        }
        for o in dataset.objects
    ]
    out = {"schemas": out_schemas, "objects": out_objects}
    if dataset.image_url is not None:
        out["image_url"] = dataset.image_url
    return out


def load_labels(source) -> LabelSet:
    """Parse the labels JSON: explicit ids and/or click points."""
    if isinstance(source, dict):
        data = source
    else:
        if hasattr(source, "read"):
            source = source.read()
        if isinstance(source, bytes):
            source = source.decode("utf-8")
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SpecificationError(f"labels file is not valid JSON: {exc}") from exc
    def points(key):
        return tuple((p[0], p[1]) for p in data.get(key, ()))
    return LabelSet(
        positive_ids=tuple(data.get("positive", ())),
        negative_ids=tuple(data.get("negative", ())),
        positive_clicks=points("positive_clicks"),
        negative_clicks=points("negative_clicks"),
    )


def resolve_clicks(
    dataset: Dataset, points: Sequence[tuple[Number, Number]]
) -> list[Optional[str]]:
    """Map click points to object ids.

    A point labels the object whose region contains it; with several
    containing regions the smallest area wins (area ties: dataset order).
    Points outside every region resolve to None — a result, not an error.
    """
    resolved: list[Optional[str]] = []
    for (px, py) in points:
        best = None
        best_area = None
        for obj in dataset.objects:
            if obj.region.contains(px, py):
                area = obj.region.area
                if best_area is None or area < best_area:
                    best, best_area = obj.id, area
        resolved.append(best)
    return resolved


def resolve_labels(dataset: Dataset, labels: LabelSet) -> tuple[set[str], set[str], list]:
    """Resolve a LabelSet to (positive ids, negative ids, unmatched points)."""
    unmatched = []
    pos = set(labels.positive_ids)
    neg = set(labels.negative_ids)
    for polarity, clicks, target in (
        ("positive", labels.positive_clicks, pos),
        ("negative", labels.negative_clicks, neg),
    ):
        hits = resolve_clicks(dataset, clicks)
        for point, hit in zip(clicks, hits):
            if hit is None:
                unmatched.append((polarity, point))
            else:
                target.add(hit)
    return pos, neg, unmatched


def build_specification(dataset: Dataset, edit_or_labels) -> Specification:
    """Resolve labels (ids and clicks) into a validated Specification."""
    labels = edit_or_labels.labels if isinstance(edit_or_labels, EditRequest) else edit_or_labels
    pos, neg, _unmatched = resolve_labels(dataset, labels)
    return Specification(dataset, frozenset(pos), frozenset(neg))


def partition_by_class(
    spec: Specification,
) -> dict[str, tuple[tuple[ObjectRecord, ...], tuple[ObjectRecord, ...]]]:
    """Per-class label sets, keyed by the classes that have positives.

    Classes with only negative labels contribute no key: their clause would
    need a positive seed, and class-guarded clauses never select foreign
    classes anyway.
    """
    out: dict[str, tuple[list, list]] = {}
    for obj in spec.positives:
        out.setdefault(obj.class_name, ([], []))[0].append(obj)
    for obj in spec.negatives:
        if obj.class_name in out:
            out[obj.class_name][1].append(obj)
    return {name: (tuple(p), tuple(n)) for name, (p, n) in out.items()}
