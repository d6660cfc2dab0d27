"""Dataset I/O: label and detection text files, manifests, raster images."""

from .labels import (
    Annotation,
    Detection,
    DETECTION_COLUMNS,
    parse_label_file,
    parse_detection_file,
    serialize_annotations,
    serialize_detections,
)
from .split import (
    ImageRecord,
    Manifest,
    ManifestIds,
    read_manifest_ids,
    split_counts,
    split_dataset,
    write_manifest,
)
from .ppm import RasterImage, load_ppm, write_ppm, read_image, write_image
from .resize import resize_image

__all__ = [
    "Annotation",
    "Detection",
    "DETECTION_COLUMNS",
    "ImageRecord",
    "Manifest",
    "ManifestIds",
    "RasterImage",
    "load_ppm",
    "parse_detection_file",
    "parse_label_file",
    "read_image",
    "read_manifest_ids",
    "resize_image",
    "serialize_annotations",
    "serialize_detections",
    "split_counts",
    "split_dataset",
    "write_image",
    "write_manifest",
    "write_ppm",
]
