"""Unified OCR and document-understanding annotation toolkit.

The annotation format keys image paths to records holding image size and
one or two levels of parallel-array instance tables (``content_ann`` and
``content_ann2``). This package parses and validates that format, projects
records onto task-specific samples, runs config-driven transforms, converts
to and from COCO / ICDAR / CoNLL, and computes the usual evaluation metrics.
"""

__version__ = "0.1.0"

from .geometry import GeoBox, normalize_bbox
from .schema import (
    AnnotationSet,
    ContentAnn,
    ImageRecord,
    full_image_record,
    load_annotation_file,
    merge_sets,
    parse_annotation_file,
    serialize_canonical,
)
from .tasks import TaskKind, TaskSample, label_vocabulary, project, required_keys
from .validator import Diagnostic, Severity, ValidationReport, validate_record, validate_set

__all__ = [
    "AnnotationSet",
    "ContentAnn",
    "Diagnostic",
    "GeoBox",
    "ImageRecord",
    "Severity",
    "TaskKind",
    "TaskSample",
    "ValidationReport",
    "full_image_record",
    "label_vocabulary",
    "load_annotation_file",
    "merge_sets",
    "normalize_bbox",
    "parse_annotation_file",
    "project",
    "required_keys",
    "serialize_canonical",
    "validate_record",
    "validate_set",
]
