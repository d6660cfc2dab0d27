"""Synthetic pothole-style corpus used by pipeline and acceptance tests.

Images are gray road-like backgrounds with dark elliptical blobs; the
ground-truth box of each blob is exactly the ellipse's bounding box.
Detections can be derived from the ground truth with a controlled
horizontal shift of ``jitter`` times the box width, which yields a known
overlap of (1 - jitter) / (1 + jitter) for every box.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from potholeval.boxgeom import NormBox
from potholeval.dataio import (
    Annotation,
    Detection,
    RasterImage,
    serialize_annotations,
    serialize_detections,
    write_image,
)

IMG_W, IMG_H = 96, 64

# blob centers sit on a coarse grid so jittered copies never overlap a neighbour
_SLOTS = ((0.25, 0.3), (0.72, 0.3), (0.25, 0.72), (0.72, 0.72))


def _render(annotations) -> RasterImage:
    yy, xx = np.mgrid[0:IMG_H, 0:IMG_W]
    canvas = np.full((IMG_H, IMG_W), 150.0)
    for ann in annotations:
        box = ann.box
        cx, cy = box.cx * IMG_W, box.cy * IMG_H
        rx, ry = box.w * IMG_W / 2.0, box.h * IMG_H / 2.0
        inside = ((xx + 0.5 - cx) / rx) ** 2 + ((yy + 0.5 - cy) / ry) ** 2 <= 1.0
        canvas[inside] = 40.0
    return RasterImage.from_float(np.repeat(canvas[:, :, None], 3, axis=2))


def make_annotations(rng: np.random.Generator) -> list[Annotation]:
    """1 to 4 well-separated elliptical blobs with exact bounding boxes."""
    n = int(rng.integers(1, len(_SLOTS) + 1))
    slots = rng.permutation(len(_SLOTS))[:n]
    annotations = []
    for s in sorted(slots):
        cx, cy = _SLOTS[s]
        w = float(rng.uniform(0.12, 0.2))
        h = float(rng.uniform(0.12, 0.2))
        annotations.append(Annotation(0, NormBox(cx, cy, w, h)))
    return annotations


def jittered_detections(annotations, jitter: float, rng: np.random.Generator):
    """Ground truth shifted right by ``jitter`` of each box width.

    The shifted box overlaps its source with IoU (1 - jitter)/(1 + jitter)
    exactly (up to float arithmetic). Confidences are random but distinct.
    """
    detections = []
    for ann in annotations:
        box = ann.box
        conf = float(rng.uniform(0.5, 0.99))
        detections.append(
            Detection(0, conf, NormBox(box.cx + jitter * box.w, box.cy, box.w, box.h))
        )
    return detections


def make_corpus(root, n_images: int = 60, seed: int = 1234, jitter: float = 0.0,
                with_images: bool = True):
    """Write gt/, det/, and optionally img/ subtrees under ``root``."""
    root = Path(root)
    gt_dir = root / "gt"
    det_dir = root / "det"
    img_dir = root / "img"
    for d in (gt_dir, det_dir) + ((img_dir,) if with_images else ()):
        d.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    ids = []
    for i in range(n_images):
        image_id = f"img{i:04d}"
        ids.append(image_id)
        annotations = make_annotations(rng)
        (gt_dir / f"{image_id}.txt").write_text(serialize_annotations(annotations))
        detections = jittered_detections(annotations, jitter, rng)
        (det_dir / f"{image_id}.txt").write_text(serialize_detections(detections))
        if with_images:
            write_image(img_dir / f"{image_id}.ppm", _render(annotations))
    return ids


def write_jittered_detections(root, ids, jitter: float, seed: int = 77,
                              det_subdir: str = "det") -> Path:
    """Re-derive detection files from the gt/ tree at a given jitter level."""
    from potholeval.dataio import parse_label_file

    root = Path(root)
    det_dir = root / det_subdir
    det_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for image_id in ids:
        annotations = parse_label_file((root / "gt" / f"{image_id}.txt").read_text())
        detections = jittered_detections(annotations, jitter, rng)
        (det_dir / f"{image_id}.txt").write_text(serialize_detections(detections))
    return det_dir


def write_manifest_for(root, ids, seed: int = 0) -> Path:
    """All ids in the test split, as evaluation expects."""
    import json

    path = Path(root) / "manifest.json"
    payload = {"seed": seed, "train": [], "val": [], "test": list(ids)}
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path
