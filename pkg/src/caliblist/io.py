"""Instance (de)serialization for the CLI file format.

Instances are stored as a single JSON document with explicit mode; unknown
fields are rejected so that typos fail loudly.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import (
    Instance,
    PositionWeights,
    Subdistribution,
    ValidationError,
    validate_instance,
)

__all__ = ["instance_to_dict", "instance_from_dict", "load_instance", "save_instance"]

_FIELDS = {"genres", "target", "items", "weights", "k", "mode"}


def instance_to_dict(inst: Instance) -> dict:
    return {
        "genres": list(inst.genres),
        "target": {g: v for g, v in sorted(inst.target.items())},
        "items": [
            {"id": i, "dist": {g: v for g, v in sorted(d.items())}}
            for i, d in inst.items
        ],
        "weights": list(inst.weights.w),
        "k": inst.k,
        "mode": inst.mode,
    }


def instance_from_dict(data: dict) -> Instance:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ValidationError(f"unknown instance fields: {sorted(unknown)}")
    missing = _FIELDS - set(data) - {"k"}
    if missing:
        raise ValidationError(f"missing instance fields: {sorted(missing)}")
    weights = PositionWeights(tuple(float(v) for v in data["weights"]))
    if "k" in data and int(data["k"]) != weights.k:
        raise ValidationError(
            f"k={data['k']} does not match {weights.k} weights")
    items = []
    for entry in data["items"]:
        extra = set(entry) - {"id", "dist"}
        if extra:
            raise ValidationError(f"unknown item fields: {sorted(extra)}")
        items.append((str(entry["id"]),
                      Subdistribution({g: float(v) for g, v in entry["dist"].items()})))
    inst = Instance(
        genres=tuple(str(g) for g in data["genres"]),
        target=Subdistribution({g: float(v) for g, v in data["target"].items()}),
        items=tuple(items),
        weights=weights,
        mode=str(data["mode"]),
    )
    return validate_instance(inst)


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"cannot parse {path}: {exc}") from exc
    return instance_from_dict(data)


def save_instance(inst: Instance, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")
