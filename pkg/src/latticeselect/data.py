"""Access to bundled schema files, fixtures, and the benchmark suite."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .dataset import ClassSchema, parse_class_schema

DEFAULT_SCHEMAS = ("text", "vehicle", "person")


def _data_root() -> Path:
    return Path(resources.files("latticeselect") / "data")


def schema_path(name: str) -> Path:
    return _data_root() / "schemas" / f"{name}.json"


def fixture_path(name: str) -> Path:
    return _data_root() / "fixtures" / name


def suite_dir() -> Path:
    return _data_root() / "suite"


def load_default_schemas(name: str) -> dict[str, ClassSchema]:
    """One of the bundled class schemas ('text', 'vehicle', 'person')."""
    data = json.loads(schema_path(name).read_text(encoding="utf-8"))
    return {cls: parse_class_schema(cls, spec) for cls, spec in data.items()}
