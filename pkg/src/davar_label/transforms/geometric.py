"""Geometric record transforms. Only coordinates and image size change."""

from __future__ import annotations

from dataclasses import replace
from typing import Callable

from ..errors import BadK, BadTarget
from ..geometry import GeoBox, Number, Point, normalize_bbox
from ..schema import ContentAnn, ImageRecord


def _map_record(record: ImageRecord, fn: Callable[[Number, Number], Point],
                width: int, height: int, renormalize: bool) -> ImageRecord:
    def map_box(box: GeoBox) -> GeoBox:
        out = box.map_points(fn)
        if renormalize and not out.is_axis_aligned:
            out = normalize_bbox(out)
        return out

    def map_content(content: ContentAnn | None) -> ContentAnn | None:
        if content is None:
            return None
        return replace(content, bboxes=tuple(map_box(b) for b in content.bboxes))

    return replace(record, width=width, height=height,
                   content_ann=map_content(record.content_ann),
                   content_ann2=map_content(record.content_ann2))


def _scale(value: Number, num: int, den: int) -> Number:
    if num == den:
        return value
    if isinstance(value, int):
        q, r = divmod(value * num, den)
        return q if r == 0 else value * num / den
    return value * num / den


def apply_resize(record: ImageRecord, target_w: int, target_h: int) -> ImageRecord:
    """Rescale geometry to a ``target_w`` x ``target_h`` image.

    Integer coordinates that land exactly on an integer stay integers.
    """
    if target_w <= 0 or target_h <= 0:
        raise BadTarget(f"resize target must be positive, got {target_w}x{target_h}")
    w, h = record.width, record.height

    def fn(x: Number, y: Number) -> Point:
        return _scale(x, target_w, w), _scale(y, target_h, h)

    return _map_record(record, fn, target_w, target_h, renormalize=False)


def apply_hflip(record: ImageRecord) -> ImageRecord:
    w = record.width
    return _map_record(record, lambda x, y: (w - x, y), record.width, record.height, renormalize=True)


def apply_vflip(record: ImageRecord) -> ImageRecord:
    h = record.height
    return _map_record(record, lambda x, y: (x, h - y), record.width, record.height, renormalize=True)


def apply_rotate90(record: ImageRecord, k: int) -> ImageRecord:
    """Rotate by ``k`` quarter turns counter-clockwise as displayed (``numpy.rot90`` sense).

    One turn maps ``(x, y)`` to ``(y, width - x)`` and swaps the image size.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k not in (1, 2, 3):
        raise BadK(f"k must be 1, 2 or 3, got {k!r}")
    for _ in range(k):
        w = record.width
        record = _map_record(record, lambda x, y, w=w: (y, w - x),
                             record.height, record.width, renormalize=True)
    return record
