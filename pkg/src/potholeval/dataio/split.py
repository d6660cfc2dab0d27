"""Deterministic train/validation/test splitting and manifest files.

The split shuffles record order under a seed, then assigns contiguous
slices. Validation and test sizes are ``round(N * part / total)`` with the
remainder going to training, so the counts always sum to N. Passing parts
that already sum to N therefore acts as an explicit-counts mode and
reproduces them exactly.

Manifest files are JSON with the shape::

    {"seed": 7, "train": [ids], "val": [ids], "test": [ids]}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from ..boxgeom import ImageDims
from ..errors import ParseError, ValidationError
from .labels import Annotation


@dataclass(frozen=True)
class ImageRecord:
    """One dataset image with its ground-truth annotations."""

    image_id: str
    dims: ImageDims
    annotations: tuple[Annotation, ...] = ()


@dataclass(frozen=True)
class Manifest:
    train: tuple[ImageRecord, ...]
    val: tuple[ImageRecord, ...]
    test: tuple[ImageRecord, ...]
    split_seed: int


@dataclass(frozen=True)
class ManifestIds:
    """Id-only view of a manifest, as stored on disk."""

    seed: int
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]

    def split(self, name: str) -> tuple[str, ...]:
        if name == "all":
            return self.train + self.val + self.test
        if name not in ("train", "val", "test"):
            raise ValidationError(f"unknown split {name!r}")
        return getattr(self, name)


def split_counts(n: int, ratio: tuple[int, int, int]) -> tuple[int, int, int]:
    """Target (train, val, test) sizes for ``n`` records under ``ratio``."""
    train_part, val_part, test_part = ratio
    if train_part <= 0 or val_part <= 0 or test_part <= 0:
        raise ValidationError(f"ratio parts must be positive, got {ratio}")
    if n <= 0:
        raise ValidationError("cannot split an empty record set")
    total = train_part + val_part + test_part
    n_val = round(n * val_part / total)
    n_test = round(n * test_part / total)
    n_train = n - n_val - n_test
    if n_train < 0:
        raise ValidationError(f"ratio {ratio} leaves no records for training at n={n}")
    return n_train, n_val, n_test


def split_dataset(
    records: list[ImageRecord], ratio: tuple[int, int, int], seed: int
) -> Manifest:
    """Shuffle deterministically under ``seed`` and cut into three slices.

    The same seed and input order always produce the same manifest.
    """
    ids = [r.image_id for r in records]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate image ids in input records")
    n_train, n_val, n_test = split_counts(len(records), ratio)
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    return Manifest(
        train=tuple(shuffled[:n_train]),
        val=tuple(shuffled[n_train : n_train + n_val]),
        test=tuple(shuffled[n_train + n_val :]),
        split_seed=seed,
    )


def write_manifest(manifest: Manifest) -> str:
    """Serialize a manifest to its JSON id-list form."""
    payload = {
        "seed": manifest.split_seed,
        "train": [r.image_id for r in manifest.train],
        "val": [r.image_id for r in manifest.val],
        "test": [r.image_id for r in manifest.test],
    }
    return json.dumps(payload, indent=2) + "\n"


def read_manifest_ids(text: str) -> ManifestIds:
    """Parse a manifest JSON document into its id lists."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ParseError("manifest must be a JSON object")
    for key in ("seed", "train", "val", "test"):
        if key not in payload:
            raise ParseError(f"manifest missing key {key!r}")
    splits = {}
    for key in ("train", "val", "test"):
        values = payload[key]
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise ParseError(f"manifest key {key!r} must be a list of image ids")
        splits[key] = tuple(values)
    all_ids = splits["train"] + splits["val"] + splits["test"]
    if len(set(all_ids)) != len(all_ids):
        raise ParseError("manifest splits share image ids")
    return ManifestIds(seed=int(payload["seed"]), **splits)
