import pytest

import latticeselect as ls
from latticeselect.dataset import LabelSet
from latticeselect.errors import DatasetError
from latticeselect.generator import GeneratorSpec, generate, write_files
from latticeselect.lattice import format_element
from latticeselect.synth import synthesize_clauses


def test_generated_dataset_validates_and_labels_are_consistent():
    spec = GeneratorSpec(attrs=4, range_size=3, positives=3, negatives=4, neutral=10,
                         numeric_fraction=0.5, seed=5)
    dataset_dict, labels_dict = generate(spec)
    dataset = ls.load_dataset(dataset_dict)
    assert len(dataset.objects) == spec.object_count
    labels = LabelSet(
        positive_ids=tuple(labels_dict["positive"]),
        negative_ids=tuple(labels_dict["negative"]),
    )
    spec_obj = ls.build_specification(dataset, labels)
    assert len(spec_obj.positive_ids) == 3
    assert len(spec_obj.negative_ids) == 4


def test_same_seed_byte_identical(tmp_path):
    spec = GeneratorSpec(attrs=3, range_size=4, positives=2, negatives=2, neutral=5, seed=9)
    d1, l1 = write_files(spec, tmp_path / "a")
    d2, l2 = write_files(spec, tmp_path / "b")
    assert d1.read_bytes() == d2.read_bytes()
    assert l1.read_bytes() == l2.read_bytes()


def test_different_seed_differs(tmp_path):
    base = GeneratorSpec(attrs=3, range_size=4, positives=2, negatives=2, neutral=5, seed=9)
    other = GeneratorSpec(attrs=3, range_size=4, positives=2, negatives=2, neutral=5, seed=10)
    d1, _ = write_files(base, tmp_path / "a")
    d2, _ = write_files(other, tmp_path / "b")
    assert d1.read_bytes() != d2.read_bytes()


def test_minimal_instance_forces_singleton_clause():
    dataset_dict, labels_dict = generate(GeneratorSpec(attrs=1, range_size=2, positives=1, negatives=1, seed=17))
    dataset = ls.load_dataset(dataset_dict)
    spec_obj = ls.build_specification(
        dataset,
        LabelSet(
            positive_ids=tuple(labels_dict["positive"]),
            negative_ids=tuple(labels_dict["negative"]),
        ),
    )
    (pos_obj,) = spec_obj.positives
    ctx = ls.build_context(
        dataset.schemas[pos_obj.class_name], spec_obj.positives + spec_obj.negatives
    )
    clauses, _ = synthesize_clauses(
        ctx,
        [(pos_obj.id, ls.atom_of(ctx, pos_obj))],
        [ls.atom_of(ctx, o) for o in spec_obj.negatives],
    )
    value = pos_obj.attributes["a0"]
    assert [format_element(c) for c in clauses] == ["<{%s}>" % value]


def test_overfull_space_rejected():
    with pytest.raises(DatasetError, match="value space"):
        generate(GeneratorSpec(attrs=1, range_size=2, positives=2, negatives=1, seed=1))


def test_spec_validation():
    with pytest.raises(DatasetError):
        GeneratorSpec(attrs=0, range_size=2, positives=1, negatives=0)
    with pytest.raises(DatasetError):
        GeneratorSpec(attrs=1, range_size=2, positives=0, negatives=0)
    with pytest.raises(DatasetError):
        GeneratorSpec(attrs=1, range_size=2, positives=1, negatives=0, numeric_fraction=2.0)
