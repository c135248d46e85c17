"""ICDAR-style spotting ground truth: one ``x1,y1,...,x4,y4,transcription`` line per box.

Representable subset: quadrilateral ``bboxes``, ``texts`` and the ``cares``
flag. Ignored boxes (``cares == 0``) are written with the transcription
``###`` and read back with ``texts == "###"`` and ``cares == 0``. Image
size is not stored in these files.
"""

from __future__ import annotations

import math
import re
from typing import Mapping

from ..errors import ConversionError, InvalidRecord, MissingRequiredKey, NonQuadBox
from ..geometry import GeoBox, Number
from ..schema import AnnotationSet, ContentAnn, ImageRecord

IGNORE_TEXT = "###"
_INT = re.compile(r"[+-]?\d+\Z")


def _fmt(value: Number) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _num(token: str) -> Number:
    token = token.strip()
    if _INT.match(token):
        return int(token)
    value = float(token)
    if not math.isfinite(value):
        raise ConversionError(f"non-finite coordinate {token!r}")
    return value


def _quad(box: GeoBox) -> tuple[Number, ...]:
    if box.is_axis_aligned:
        return tuple(c for v in box.vertices() for c in v)
    if len(box.points) != 8:
        raise NonQuadBox(f"box with {len(box.points) // 2} vertices cannot be written as a quadrilateral")
    return box.points


def record_to_icdar(record: ImageRecord) -> str:
    content = record.content_ann
    if content.texts is None:
        raise MissingRequiredKey("texts", "spotting")
    cares = content.extras.get("cares")
    n = len(content.bboxes)
    if len(content.texts) != n or (cares is not None and len(cares) != n):
        raise InvalidRecord("bboxes, texts and cares must have equal length")
    lines = []
    for i, (box, text) in enumerate(zip(content.bboxes, content.texts)):
        if "\n" in text or "\r" in text:
            raise ConversionError(f"transcription {text!r} contains a line break")
        if cares is not None and not cares[i]:
            text = IGNORE_TEXT
        lines.append(",".join(_fmt(c) for c in _quad(box)) + "," + text + "\n")
    return "".join(lines)


def to_icdar_spotting(annotations: AnnotationSet) -> dict[str, str]:
    """Map each image path to the text of its ground-truth file."""
    return {path: record_to_icdar(rec) for path, rec in annotations.items()}


def icdar_to_record(text: str, width: int | None = None, height: int | None = None) -> ImageRecord:
    """Parse one ground-truth file.

    Without an explicit size the image is taken to be the smallest integer
    extent covering every coordinate.
    """
    boxes, texts, cares = [], [], []
    if text.startswith("\ufeff"):
        text = text[1:]
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        if not line.strip():
            continue
        parts = line.split(",", 8)
        if len(parts) < 9:
            raise ConversionError(f"line {lineno}: expected 8 coordinates and a transcription")
        try:
            coords = tuple(_num(p) for p in parts[:8])
        except ValueError as exc:
            raise ConversionError(f"line {lineno}: {exc}") from exc
        boxes.append(GeoBox(coords))
        texts.append(parts[8])
        cares.append(0 if parts[8] == IGNORE_TEXT else 1)
    if width is None:
        width = max([1] + [math.ceil(b.hull()[2]) for b in boxes])
    if height is None:
        height = max([1] + [math.ceil(b.hull()[3]) for b in boxes])
    content = ContentAnn(bboxes=tuple(boxes), texts=tuple(texts), extras={"cares": tuple(cares)})
    return ImageRecord(height=height, width=width, content_ann=content)


def from_icdar_spotting(
    files: Mapping[str, str], sizes: Mapping[str, tuple[int, int]] | None = None
) -> AnnotationSet:
    """Build a set from ``{image path: file text}``; ``sizes`` maps path to ``(width, height)``."""
    sizes = sizes or {}
    out = {}
    for path, text in files.items():
        w, h = sizes.get(path, (None, None))
        out[path] = icdar_to_record(text, w, h)
    return AnnotationSet(out)
