"""COCO detection export/import.

Representable subset: image size, ``bboxes`` and one label position.
Axis-aligned boxes travel as ``bbox`` only (empty ``segmentation``);
polygons travel as ``segmentation`` with their hull as ``bbox``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..errors import (
    ConversionError,
    DanglingReference,
    DuplicateImagePath,
    InvalidRecord,
    MissingRequiredKey,
    SubtaskIndexOutOfRange,
)
from ..geometry import GeoBox, is_number
from ..schema import AnnotationSet, ContentAnn, ImageRecord


@dataclass
class CocoDetectionDoc:
    images: list[dict[str, Any]] = field(default_factory=list)
    annotations: list[dict[str, Any]] = field(default_factory=list)
    categories: list[dict[str, Any]] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {"images": self.images, "annotations": self.annotations, "categories": self.categories}

    @classmethod
    def from_json(cls, obj: Any) -> "CocoDetectionDoc":
        if not isinstance(obj, dict):
            raise ConversionError("COCO document must be a JSON object")
        parts = []
        for key in ("images", "annotations", "categories"):
            value = obj.get(key, [])
            if not isinstance(value, list) or not all(isinstance(v, dict) for v in value):
                raise ConversionError(f"COCO {key!r} must be a list of objects")
            parts.append(value)
        return cls(*parts)

    @classmethod
    def loads(cls, text: str) -> "CocoDetectionDoc":
        return cls.from_json(json.loads(text))


def to_coco_detection(annotations: AnnotationSet, subtask_index: int = 0) -> CocoDetectionDoc:
    """Export boxes and ``labels[i][subtask_index]`` as a COCO detection document.

    Image and annotation ids count from 1 in canonical order; category ids
    count from 1 in sorted category-name order.
    """
    names: set[str] = set()
    for path, rec in annotations.items():
        content = rec.content_ann
        if content.labels is None:
            raise MissingRequiredKey("labels", "layout_analysis")
        if len(content.labels) != len(content.bboxes):
            raise InvalidRecord(f"{path}: {len(content.labels)} labels for {len(content.bboxes)} boxes")
        for i, vector in enumerate(content.labels):
            if not 0 <= subtask_index < len(vector):
                raise SubtaskIndexOutOfRange(f"{path}: labels[{i}] has no subtask {subtask_index}")
            names.add(vector[subtask_index])
    cat_ids = {name: i + 1 for i, name in enumerate(sorted(names))}

    doc = CocoDetectionDoc(categories=[{"id": cat_ids[n], "name": n} for n in sorted(names)])
    ann_id = 0
    for image_id, (path, rec) in enumerate(annotations.items(), start=1):
        doc.images.append({"id": image_id, "file_name": path, "width": rec.width, "height": rec.height})
        content = rec.content_ann
        for box, vector in zip(content.bboxes, content.labels or ()):
            ann_id += 1
            x1, y1, x2, y2 = box.hull()
            doc.annotations.append({
                "id": ann_id,
                "image_id": image_id,
                "category_id": cat_ids[vector[subtask_index]],
                "bbox": [x1, y1, x2 - x1, y2 - y1],
                "segmentation": [] if box.is_axis_aligned else [list(box.points)],
                "area": box.area(),
                "iscrowd": 0,
            })
    return doc


def _unique(items: list[dict[str, Any]], what: str) -> dict[Any, dict[str, Any]]:
    out: dict[Any, dict[str, Any]] = {}
    for item in items:
        if "id" not in item:
            raise ConversionError(f"{what} entry without 'id'")
        if item["id"] in out:
            raise ConversionError(f"duplicate {what} id {item['id']!r}")
        out[item["id"]] = item
    return out


def _box_from_annotation(ann: dict[str, Any]) -> GeoBox:
    seg = ann.get("segmentation")
    if isinstance(seg, list) and len(seg) == 1 and isinstance(seg[0], list) and len(seg[0]) >= 8:
        return GeoBox(tuple(seg[0]))
    bbox = ann.get("bbox")
    if not (isinstance(bbox, list) and len(bbox) == 4 and all(is_number(v) for v in bbox)):
        raise ConversionError(f"annotation {ann.get('id')!r} has no usable bbox")
    x, y, w, h = bbox
    return GeoBox((x, y, x + w, y + h))


def from_coco_detection(doc: CocoDetectionDoc) -> AnnotationSet:
    """Rebuild an annotation set with ``bboxes`` and single-subtask ``labels``.

    Annotations keep ascending-id order within each image.

    Raises:
        DanglingReference: an annotation names an unknown image or category.
        DuplicateImagePath: two images share a ``file_name``.
    """
    images = _unique(doc.images, "image")
    categories = _unique(doc.categories, "category")
    per_image: dict[Any, list[dict[str, Any]]] = {i: [] for i in images}
    anns_by_id = _unique(doc.annotations, "annotation")
    for _, ann in sorted(anns_by_id.items()):
        if ann.get("image_id") not in images:
            raise DanglingReference(f"annotation {ann.get('id')!r} references unknown image {ann.get('image_id')!r}")
        if ann.get("category_id") not in categories:
            raise DanglingReference(
                f"annotation {ann.get('id')!r} references unknown category {ann.get('category_id')!r}"
            )
        per_image[ann["image_id"]].append(ann)

    records: dict[str, ImageRecord] = {}
    for image_id, image in images.items():
        path = image["file_name"]
        if path in records:
            raise DuplicateImagePath(path)
        anns = per_image[image_id]
        content = ContentAnn(
            bboxes=tuple(_box_from_annotation(a) for a in anns),
            labels=tuple((categories[a["category_id"]]["name"],) for a in anns),
        )
        records[path] = ImageRecord(height=image["height"], width=image["width"], content_ann=content)
    return AnnotationSet(records)
