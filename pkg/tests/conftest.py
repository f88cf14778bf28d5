import json
import random

import pytest

import latticeselect as ls
from latticeselect.data import fixture_path
from latticeselect.dataset import (
    AttributeSchema,
    ClassSchema,
    Dataset,
    LabelSet,
    ObjectRecord,
    Region,
)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    ls.warmup()


@pytest.fixture(scope="session")
def six_dataset() -> Dataset:
    return ls.load_dataset(fixture_path("people_six.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def six_labels() -> LabelSet:
    return ls.load_labels(fixture_path("people_six_labels.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def six_spec(six_dataset, six_labels):
    return ls.build_specification(six_dataset, six_labels)


@pytest.fixture(scope="session")
def six_ctx(six_dataset, six_spec):
    labeled = six_spec.positives + six_spec.negatives
    return ls.build_context(six_dataset.schemas["Person"], labeled)


@pytest.fixture(scope="session")
def six_atoms(six_dataset, six_ctx):
    return {o.id: ls.atom_of(six_ctx, o) for o in six_dataset.objects}


NUMERIC_LO, NUMERIC_HI = 0, 10


def random_instance(rng: random.Random, max_attrs=3, max_size=4, max_pos=4, max_neg=4):
    """Random small synthesis instance: (ctx, positive (id, atom) pairs,
    negative atoms). Attribute maps are unique across labeled objects."""
    n_attrs = rng.randint(1, max_attrs)
    attrs = []
    pools = []
    for i in range(n_attrs):
        if rng.random() < 0.5:
            size = rng.randint(2, max_size)
            domain = tuple(f"s{j}" for j in range(size))
            attrs.append(AttributeSchema(f"a{i}", "categorical", domain=domain))
            pools.append(domain)
        else:
            pool = sorted(
                rng.sample(range(NUMERIC_LO, NUMERIC_HI + 1), rng.randint(1, max_size))
            )
            attrs.append(
                AttributeSchema(f"a{i}", "numeric", lower=NUMERIC_LO, upper=NUMERIC_HI)
            )
            pools.append(tuple(pool))
    schema = ClassSchema("C", tuple(attrs))

    n_pos = rng.randint(1, max_pos)
    n_neg = rng.randint(0, max_neg)
    space = 1
    for pool in pools:
        space *= len(pool)
    n_pos = min(n_pos, space)
    n_neg = min(n_neg, space - n_pos)

    seen = set()
    maps = []
    while len(maps) < n_pos + n_neg:
        candidate = tuple(rng.choice(pool) for pool in pools)
        if candidate in seen:
            continue
        seen.add(candidate)
        maps.append(candidate)

    objects = []
    for idx, values in enumerate(maps):
        objects.append(
            ObjectRecord(
                id=f"o{idx}",
                class_name="C",
                region=Region(idx * 10, 0, 8, 8),
                attributes={a.name: v for a, v in zip(attrs, values)},
            )
        )
    ctx = ls.build_context(schema, objects)
    pos_pairs = [(o.id, ls.atom_of(ctx, o)) for o in objects[:n_pos]]
    neg_atoms = [ls.atom_of(ctx, o) for o in objects[n_pos:]]
    return ctx, pos_pairs, neg_atoms
