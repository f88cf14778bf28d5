"""Deterministic synthetic dataset/label generation for benchmarks and
stress tests.

Each attribute draws from a pool of ``range_size`` distinct values
(categorical symbols, or integers inside [0, 100] for numeric attributes);
attribute maps are sampled without repetition so objects stay uniquely
identifiable, labels are disjoint with at least one positive, and identical
(spec, seed) pairs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DatasetError

NUMERIC_LOWER = 0
NUMERIC_UPPER = 100


@dataclass(frozen=True)
class GeneratorSpec:
    attrs: int
    range_size: int
    positives: int
    negatives: int
    neutral: int = 0
    numeric_fraction: float = 0.0
    seed: int = 0
    class_name: str = "Synth"

    def __post_init__(self):
        if self.attrs < 1:
            raise DatasetError("attrs must be >= 1")
        if self.range_size < 2:
            raise DatasetError("range_size must be >= 2")
        if self.positives < 1:
            raise DatasetError("at least one positive is required")
        if self.negatives < 0 or self.neutral < 0:
            raise DatasetError("counts must be >= 0")
        if not 0.0 <= self.numeric_fraction <= 1.0:
            raise DatasetError("numeric_fraction must be in [0, 1]")

    @property
    def object_count(self) -> int:
        return self.positives + self.negatives + self.neutral


def _value_pools(spec: GeneratorSpec, rng: random.Random):
    n_numeric = round(spec.numeric_fraction * spec.attrs)
    n_categorical = spec.attrs - n_numeric
    width = len(str(max(spec.range_size - 1, spec.attrs - 1)))
    pools = []
    attrs_json = []
    for i in range(spec.attrs):
        name = f"a{i:0{width}d}"
        if i < n_categorical:
            domain = [f"v{j:0{width}d}" for j in range(spec.range_size)]
            attrs_json.append({"name": name, "kind": "categorical", "domain": domain})
            pools.append(domain)
        else:
            hi = max(NUMERIC_UPPER, 2 * spec.range_size)
            pool = sorted(rng.sample(range(NUMERIC_LOWER, hi + 1), spec.range_size))
            attrs_json.append({"name": name, "kind": "numeric", "min": NUMERIC_LOWER, "max": hi})
            pools.append(pool)
    return attrs_json, pools


def generate(spec: GeneratorSpec) -> tuple[dict, dict]:
    """Dataset and labels dicts in the on-disk JSON format."""
    rng = random.Random(spec.seed)
    attrs_json, pools = _value_pools(spec, rng)
    count = spec.object_count

    space = 1
    for pool in pools:
        space *= len(pool)
        if space > 10 * count:
            break
    if space < count:
        raise DatasetError(
            f"cannot place {count} objects in a value space of size {space}"
        )

    seen = set()
    tuples = []
    attempts = 0
    while len(tuples) < count:
        candidate = tuple(rng.choice(pool) for pool in pools)
        attempts += 1
        if attempts > 1000 * count + 1000:
            raise DatasetError("value space too crowded to sample unique attribute maps")
        if candidate in seen:
            continue
        seen.add(candidate)
        tuples.append(candidate)

    width = len(str(count - 1)) if count else 1
    cols = max(1, math.isqrt(count))
    objects = []
    for i, values in enumerate(tuples):
        objects.append(
            {
                "id": f"o{i:0{width}d}",
                "class": spec.class_name,
                "region": {"x": (i % cols) * 30, "y": (i // cols) * 30, "w": 20, "h": 20},
                "attributes": {a["name"]: v for a, v in zip(attrs_json, values)},
            }
        )

    order = list(range(count))
    rng.shuffle(order)
    positive = sorted(objects[i]["id"] for i in order[: spec.positives])
    negative = sorted(
        objects[i]["id"] for i in order[spec.positives : spec.positives + spec.negatives]
    )
    dataset = {"schemas": {spec.class_name: {"attributes": attrs_json}}, "objects": objects}
    labels = {"positive": positive, "negative": negative}
    return dataset, labels


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_files(spec: GeneratorSpec, out_dir) -> tuple[Path, Path]:
    """Write dataset.json and labels.json under out_dir; byte-deterministic."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataset, labels = generate(spec)
    dataset_path = out / "dataset.json"
    labels_path = out / "labels.json"
    dataset_path.write_text(_dump(dataset), encoding="utf-8")
    labels_path.write_text(_dump(labels), encoding="utf-8")
    return dataset_path, labels_path
