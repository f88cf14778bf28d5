#!/usr/bin/env python3
"""Build the bundled benchmark suite.

Each case's expected selection is produced by full-mode synthesis and then
verified: per-class clause counts must match the enumeration oracle's
optimum, every clause must be an oracle maximal, and all four modes must
select identical objects. Cases are only written if every check passes.
"""

import json
import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import latticeselect as ls
from latticeselect.data import fixture_path
from latticeselect.dataset import EditRequest, load_dataset, load_labels, partition_by_class
from latticeselect.generator import GeneratorSpec, generate
from latticeselect.synth import SynthesisMode, oracle_synthesize, synthesize_clauses

SUITE = Path(__file__).resolve().parents[1] / "src" / "latticeselect" / "data" / "suite"
ORACLE_CAP = 2_000_000

GEN_CASES = [
    ("case_02_vehicle_blur", GeneratorSpec(2, 10, 5, 7, neutral=40, seed=11), "Cover(Blur)"),
    ("case_03_vehicle_recolor", GeneratorSpec(2, 10, 6, 6, neutral=30, seed=12), "Recolor(#ff0000)"),
    ("case_04_boolish_remove", GeneratorSpec(10, 2, 4, 5, neutral=20, seed=13), "Remove"),
    ("case_05_boolish_numeric", GeneratorSpec(8, 2, 4, 5, neutral=20, numeric_fraction=0.25, seed=14), "Cover(Mosaic)"),
    ("case_06_personish_remove", GeneratorSpec(12, 2, 6, 9, neutral=25, seed=15), "Remove"),
    ("case_07_personish_highlight", GeneratorSpec(12, 2, 5, 10, neutral=25, seed=16), "Cover(Highlight)"),
    ("case_08_minimal", GeneratorSpec(1, 2, 1, 1, seed=17), "Remove"),
    ("case_09_numeric_mix", GeneratorSpec(3, 4, 4, 4, neutral=10, numeric_fraction=0.34, seed=18), 'Inpaint("grass")'),
    ("case_10_five_attr", GeneratorSpec(5, 3, 5, 8, neutral=30, seed=19), "Cover(Blackout)"),
    ("case_11_numeric_heavy", GeneratorSpec(4, 4, 2, 6, neutral=12, numeric_fraction=0.5, seed=20), "Remove"),
]

MIX_DATASET = {
    "schemas": {
        "Person": {"attributes": [
            {"name": "TopStyle", "kind": "categorical", "domain": ["NoStyle", "Stride", "Logo"]},
            {"name": "Age", "kind": "numeric", "min": 0, "max": 100},
        ]},
        "Vehicle": {"attributes": [
            {"name": "Color", "kind": "categorical", "domain": ["Red", "Blue", "White", "Black"]},
            {"name": "Type", "kind": "categorical", "domain": ["Sedan", "Van", "Bus"]},
        ]},
    },
    "objects": [
        {"id": "p1", "class": "Person", "region": {"x": 0, "y": 0, "w": 20, "h": 40}, "attributes": {"TopStyle": "NoStyle", "Age": 35}},
        {"id": "p2", "class": "Person", "region": {"x": 30, "y": 0, "w": 20, "h": 40}, "attributes": {"TopStyle": "Logo", "Age": 28}},
        {"id": "p3", "class": "Person", "region": {"x": 60, "y": 0, "w": 20, "h": 40}, "attributes": {"TopStyle": "Stride", "Age": 61}},
        {"id": "p4", "class": "Person", "region": {"x": 90, "y": 0, "w": 20, "h": 40}, "attributes": {"TopStyle": "NoStyle", "Age": 17}},
        {"id": "v1", "class": "Vehicle", "region": {"x": 0, "y": 60, "w": 40, "h": 25}, "attributes": {"Color": "Red", "Type": "Sedan"}},
        {"id": "v2", "class": "Vehicle", "region": {"x": 50, "y": 60, "w": 40, "h": 25}, "attributes": {"Color": "Blue", "Type": "Van"}},
        {"id": "v3", "class": "Vehicle", "region": {"x": 100, "y": 60, "w": 40, "h": 25}, "attributes": {"Color": "White", "Type": "Sedan"}},
        {"id": "v4", "class": "Vehicle", "region": {"x": 150, "y": 60, "w": 40, "h": 25}, "attributes": {"Color": "Red", "Type": "Bus"}},
    ],
}
MIX_LABELS = {"positive": ["p1", "v1"], "negative": ["p2", "v2", "p4"]}


def verify_case(dataset_dict, labels_dict):
    dataset = load_dataset(dataset_dict)
    labels = load_labels(labels_dict)
    spec = ls.build_specification(dataset, labels)
    selections = {}
    for mode in SynthesisMode:
        report = ls.synthesize(
            dataset, EditRequest(ls.Remove(), labels), mode=mode, cap=ORACLE_CAP
        )
        selections[mode] = set(ls.run_program(report.program, dataset).object_ids)
    assert len(set(map(frozenset, selections.values()))) == 1, "mode disagreement"

    for class_name, (pos_objs, neg_objs) in partition_by_class(spec).items():
        ctx = ls.build_context(dataset.schemas[class_name], tuple(pos_objs) + tuple(neg_objs))
        pairs = [(o.id, ls.atom_of(ctx, o)) for o in pos_objs]
        negs = [ls.atom_of(ctx, o) for o in neg_objs]
        clauses, stats = synthesize_clauses(ctx, pairs, negs)
        oracle = oracle_synthesize(ctx, pairs, negs, cap=ORACLE_CAP)
        assert stats.cover_size == oracle.optimum_size, (
            f"{class_name}: cover {stats.cover_size} != oracle {oracle.optimum_size}"
        )
        assert oracle.is_optimal_clause_set(clauses), f"{class_name}: clause set not optimal"
    return sorted(selections[SynthesisMode.FULL])


def write_case(name, dataset_dict, labels_dict, action):
    expected = verify_case(dataset_dict, labels_dict)
    stem = name.removeprefix("case_")
    (SUITE / f"{stem}.dataset.json").write_text(
        json.dumps(dataset_dict, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (SUITE / f"{stem}.labels.json").write_text(
        json.dumps(labels_dict, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    case = {
        "name": name,
        "dataset": f"{stem}.dataset.json",
        "labels": f"{stem}.labels.json",
        "action": action,
        "expected": expected,
        "timeout": 60,
    }
    (SUITE / f"{name}.json").write_text(
        json.dumps(case, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"{name}: expected {len(expected)} objects")


def main():
    SUITE.mkdir(parents=True, exist_ok=True)
    for old in SUITE.glob("*.json"):
        old.unlink()

    six = json.loads(fixture_path("people_six.json").read_text(encoding="utf-8"))
    six_labels = json.loads(fixture_path("people_six_labels.json").read_text(encoding="utf-8"))
    write_case("case_01_people_six", six, six_labels, "Remove")

    for name, spec, action in GEN_CASES:
        dataset_dict, labels_dict = generate(spec)
        write_case(name, dataset_dict, labels_dict, action)

    write_case("case_12_mix_classes", MIX_DATASET, MIX_LABELS, "Cover(Blur)")
    print("suite written to", SUITE)


if __name__ == "__main__":
    main()
