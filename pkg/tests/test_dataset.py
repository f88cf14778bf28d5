import json

import pytest

import latticeselect as ls
from latticeselect.dataset import (
    EditRequest,
    LabelSet,
    load_dataset,
    load_labels,
    partition_by_class,
    resolve_clicks,
    resolve_labels,
    serialize_dataset,
)
from latticeselect.errors import DatasetError, SpecificationError


def test_loads_six_person_fixture(six_dataset):
    assert len(six_dataset.objects) == 6
    pi7 = six_dataset.object_by_id("pi7")
    assert pi7.attributes == {"TopStyle": "NoStyle", "Age": 24}
    assert six_dataset.schemas["Person"].attribute_names == ("TopStyle", "Age")


def test_empty_objects_is_valid(six_dataset):
    data = serialize_dataset(six_dataset)
    data["objects"] = []
    assert load_dataset(data).objects == ()


def test_numeric_bounds_violation_names_object(six_dataset):
    data = serialize_dataset(six_dataset)
    data["objects"][0]["attributes"]["Age"] = 150
    with pytest.raises(DatasetError, match="pi1.*150"):
        load_dataset(data)


def test_unknown_symbol_rejected(six_dataset):
    data = serialize_dataset(six_dataset)
    data["objects"][0]["attributes"]["TopStyle"] = "Tuxedo"
    with pytest.raises(DatasetError, match="Tuxedo"):
        load_dataset(data)


def test_duplicate_ids_rejected(six_dataset):
    data = serialize_dataset(six_dataset)
    data["objects"][1]["id"] = "pi1"
    with pytest.raises(DatasetError, match="duplicate object id"):
        load_dataset(data)


def test_duplicate_attribute_maps_rejected_and_fallback_works(six_dataset):
    data = serialize_dataset(six_dataset)
    data["objects"][1]["attributes"] = dict(data["objects"][0]["attributes"])
    with pytest.raises(DatasetError, match="identical attribute maps"):
        load_dataset(data)
    fixed = load_dataset(data, identity_fallback=True)
    assert "object_id" in fixed.schemas["Person"].attribute_names
    assert fixed.object_by_id("pi3").attributes["object_id"] == "pi3"


def test_missing_attribute_rejected(six_dataset):
    data = serialize_dataset(six_dataset)
    del data["objects"][2]["attributes"]["Age"]
    with pytest.raises(DatasetError, match="missing attribute"):
        load_dataset(data)


def test_malformed_json_rejected():
    with pytest.raises(DatasetError, match="not valid JSON"):
        load_dataset(b"{nope")


def test_roundtrip_identity(six_dataset):
    again = load_dataset(json.dumps(serialize_dataset(six_dataset)))
    assert again == six_dataset


def test_schema_invariants():
    with pytest.raises(DatasetError):
        ls.AttributeSchema("A", "categorical", domain=())
    with pytest.raises(DatasetError):
        ls.AttributeSchema("A", "categorical", domain=("x", "x"))
    with pytest.raises(DatasetError):
        ls.AttributeSchema("A", "numeric", lower=5, upper=5)
    with pytest.raises(DatasetError):
        ls.AttributeSchema("my attr", "categorical", domain=("x",))


def test_resolve_clicks_center_and_miss(six_dataset):
    pi7 = six_dataset.object_by_id("pi7")
    center = (pi7.region.x + pi7.region.w / 2, pi7.region.y + pi7.region.h / 2)
    assert resolve_clicks(six_dataset, [center]) == ["pi7"]
    assert resolve_clicks(six_dataset, [(9999, 9999)]) == [None]


def test_resolve_clicks_nested_prefers_smaller_area(six_dataset):
    data = serialize_dataset(six_dataset)
    data["objects"].append(
        {
            "id": "badge",
            "class": "Person",
            "region": {"x": 195, "y": 120, "w": 5, "h": 5},
            "attributes": {"TopStyle": "Stride", "Age": 33},
        }
    )
    nested = load_dataset(data)
    # point inside both pi7's box and the smaller badge box
    hits = resolve_clicks(nested, [(197, 122)])
    containing = [
        o.id for o in nested.objects if o.region.contains(197, 122)
    ]
    assert set(containing) == {"pi7", "badge"}
    smallest = min(
        (o for o in nested.objects if o.id in containing), key=lambda o: o.region.area
    )
    assert hits == [smallest.id] == ["badge"]


def test_resolve_clicks_deterministic(six_dataset):
    points = [(200, 140), (20, 130), (0, 0)]
    assert resolve_clicks(six_dataset, points) == resolve_clicks(six_dataset, points)


def test_build_specification_matches_fixture(six_spec):
    assert six_spec.positive_ids == {"pi7", "pi10", "pi14"}
    assert six_spec.negative_ids == {"pi1", "pi3", "pi6"}
    assert six_spec.neutral_ids == frozenset()


def test_build_specification_from_clicks(six_dataset):
    def center(oid):
        o = six_dataset.object_by_id(oid)
        return (o.region.x + 1, o.region.y + 1)

    labels = LabelSet(
        positive_clicks=(center("pi7"),),
        negative_clicks=(center("pi1"), (99999, 0)),
    )
    pos, neg, unmatched = resolve_labels(six_dataset, labels)
    assert pos == {"pi7"} and neg == {"pi1"}
    assert unmatched == [("negative", (99999, 0))]
    spec = ls.build_specification(six_dataset, labels)
    assert spec.positive_ids == {"pi7"}


def test_overlapping_labels_rejected(six_dataset):
    labels = LabelSet(positive_ids=("pi7",), negative_ids=("pi7",))
    with pytest.raises(SpecificationError, match="both positive and negative"):
        ls.build_specification(six_dataset, labels)


def test_empty_positive_rejected(six_dataset):
    labels = LabelSet(negative_ids=("pi1",))
    with pytest.raises(SpecificationError, match="at least one positive"):
        ls.build_specification(six_dataset, labels)


def test_unknown_label_id_rejected(six_dataset):
    labels = LabelSet(positive_ids=("ghost",))
    with pytest.raises(SpecificationError, match="ghost"):
        ls.build_specification(six_dataset, labels)


def test_partition_by_class_single(six_spec):
    parts = partition_by_class(six_spec)
    assert set(parts) == {"Person"}
    pos, neg = parts["Person"]
    assert {o.id for o in pos} == {"pi7", "pi10", "pi14"}
    assert {o.id for o in neg} == {"pi1", "pi3", "pi6"}


def _mixed_dataset():
    return load_dataset(
        {
            "schemas": {
                "Person": {
                    "attributes": [
                        {"name": "Age", "kind": "numeric", "min": 0, "max": 100}
                    ]
                },
                "Vehicle": {
                    "attributes": [
                        {
                            "name": "Color",
                            "kind": "categorical",
                            "domain": ["Red", "Blue"],
                        }
                    ]
                },
            },
            "objects": [
                {"id": "p1", "class": "Person", "region": {"x": 0, "y": 0, "w": 1, "h": 1}, "attributes": {"Age": 10}},
                {"id": "p2", "class": "Person", "region": {"x": 2, "y": 0, "w": 1, "h": 1}, "attributes": {"Age": 20}},
                {"id": "v1", "class": "Vehicle", "region": {"x": 4, "y": 0, "w": 1, "h": 1}, "attributes": {"Color": "Red"}},
                {"id": "v2", "class": "Vehicle", "region": {"x": 6, "y": 0, "w": 1, "h": 1}, "attributes": {"Color": "Blue"}},
            ],
        }
    )


def test_partition_by_class_mixed_positives():
    ds = _mixed_dataset()
    spec = ls.build_specification(
        ds, LabelSet(positive_ids=("p1", "v1"), negative_ids=("p2", "v2"))
    )
    parts = partition_by_class(spec)
    assert set(parts) == {"Person", "Vehicle"}
    assert {o.id for o in parts["Person"][0]} == {"p1"}
    assert {o.id for o in parts["Vehicle"][1]} == {"v2"}


def test_partition_skips_class_with_only_negatives():
    ds = _mixed_dataset()
    spec = ls.build_specification(
        ds, LabelSet(positive_ids=("p1",), negative_ids=("p2", "v1"))
    )
    parts = partition_by_class(spec)
    assert set(parts) == {"Person"}
    # the Person clause is class-guarded, so the unrepresented Vehicle
    # negatives are still excluded by the final predicate
    pred, _ = ls.synthesize_by_class(spec)
    selected = {o.id for o in ds.objects if ls.eval_predicate(pred, o)}
    assert "v1" not in selected and "v2" not in selected
    assert "p1" in selected


def test_partition_sets_disjoint_and_complete(six_spec):
    parts = partition_by_class(six_spec)
    all_ids = [o.id for pos, neg in parts.values() for o in (*pos, *neg)]
    assert len(all_ids) == len(set(all_ids))
    assert set(all_ids) == six_spec.positive_ids | six_spec.negative_ids


def test_labels_roundtrip():
    labels = load_labels(
        json.dumps({"positive": ["a"], "negative": [], "positive_clicks": [[1, 2]]})
    )
    assert labels.positive_ids == ("a",)
    assert labels.positive_clicks == ((1, 2),)
