"""The unified annotation file: data model, strict parsing and canonical output.

An annotation file is one JSON object keyed by image path::

    {
      "imgs/0001.jpg": {
        "height": 800, "width": 600,
        "content_ann": {"bboxes": [[...], ...], "texts": [...], "labels": [[...], ...]},
        "content_ann2": {"bboxes": [...], "labels": [...]}
      }
    }

Every list inside a content block is parallel to ``bboxes``. Parsing only
rejects structural problems (wrong JSON types); parallel-length and geometry
problems are reported by :mod:`davar_label.validator`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Optional, Tuple

from .errors import DuplicateImagePath, MalformedJson, SchemaShapeError
from .geometry import GeoBox, is_number

KNOWN_CONTENT_KEYS = ("bboxes", "texts", "labels", "cells")
KNOWN_RECORD_KEYS = ("height", "width", "content_ann", "content_ann2")


def _freeze(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, dict):
        return {k: _freeze(v) for k, v in value.items()}
    return value


def _thaw(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    if isinstance(value, GeoBox):
        return list(value.points)
    if isinstance(value, dict):
        return {k: _thaw(v) for k, v in value.items()}
    return value


@dataclass(frozen=True)
class ContentAnn:
    """Parallel-array instance table of one annotation level.

    ``None`` means the key is absent from the file; an empty tuple means it
    is present with no instances. ``labels`` and ``cells`` elements are kept
    as parsed (normally tuples) so the validator can flag malformed entries.
    """

    bboxes: Tuple[GeoBox, ...] = ()
    texts: Optional[Tuple[str, ...]] = None
    labels: Optional[Tuple[Any, ...]] = None
    cells: Optional[Tuple[Any, ...]] = None
    extras: Mapping[str, Tuple[Any, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.bboxes)

    def keys(self) -> list[str]:
        """Names of the arrays present in this block, sorted."""
        present = [k for k in KNOWN_CONTENT_KEYS if k == "bboxes" or getattr(self, k) is not None]
        return sorted(present + list(self.extras))

    def get(self, key: str) -> Optional[Tuple[Any, ...]]:
        if key in KNOWN_CONTENT_KEYS:
            return getattr(self, key)
        return self.extras.get(key)

    def arrays(self) -> Iterator[tuple[str, Tuple[Any, ...]]]:
        """Yield ``(key, array)`` for every present array in sorted key order."""
        for key in self.keys():
            yield key, self.get(key)  # type: ignore[misc]

    def to_json(self) -> dict[str, Any]:
        return {key: _thaw(arr) for key, arr in self.arrays()}


@dataclass(frozen=True)
class ImageRecord:
    height: int
    width: int
    content_ann: ContentAnn = field(default_factory=ContentAnn)
    content_ann2: Optional[ContentAnn] = None
    extras: Mapping[str, Any] = field(default_factory=dict)

    def levels(self) -> Iterator[tuple[str, ContentAnn]]:
        yield "content_ann", self.content_ann
        if self.content_ann2 is not None:
            yield "content_ann2", self.content_ann2

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {k: _thaw(v) for k, v in self.extras.items()}
        out["height"] = self.height
        out["width"] = self.width
        out["content_ann"] = self.content_ann.to_json()
        if self.content_ann2 is not None:
            out["content_ann2"] = self.content_ann2.to_json()
        return out


class AnnotationSet(Mapping[str, ImageRecord]):
    """Immutable map from image path to record, iterated in sorted key order."""

    __slots__ = ("_records",)

    def __init__(self, records: Mapping[str, ImageRecord] | None = None):
        records = records or {}
        self._records = {k: records[k] for k in sorted(records)}

    def __getitem__(self, path: str) -> ImageRecord:
        return self._records[path]

    def __iter__(self) -> Iterator[str]:
        return iter(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AnnotationSet):
            return self._records == other._records
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._records))

    def __repr__(self) -> str:
        return f"AnnotationSet({len(self)} records)"

    def to_json(self) -> dict[str, Any]:
        return {path: rec.to_json() for path, rec in self._records.items()}


# --- parsing -----------------------------------------------------------------


def _reject_constant(name: str) -> Any:
    raise MalformedJson(f"non-finite number {name} is not valid JSON")


class _Pairs(list):
    """JSON object as parsed, before duplicate-key checking."""


def _to_dicts(value: Any, depth: int = 0) -> Any:
    if isinstance(value, _Pairs):
        out: dict[str, Any] = {}
        for key, item in value:
            if key in out:
                if depth == 0:
                    raise DuplicateImagePath(key)
                raise SchemaShapeError(f"duplicate key {key!r}")
            out[key] = _to_dicts(item, depth + 1)
        return out
    if isinstance(value, list):
        return [_to_dicts(v, depth + 1) for v in value]
    return value


def _load_json(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"input is not UTF-8: {exc}") from exc
    data = data.removeprefix("\ufeff")
    try:
        raw = json.loads(data, object_pairs_hook=_Pairs, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    return _to_dicts(raw)


def _parse_box(value: Any, where: str) -> GeoBox:
    if not isinstance(value, list) or not all(is_number(v) for v in value):
        raise SchemaShapeError(f"{where}: a box must be a list of numbers")
    return GeoBox(tuple(value))


def _parse_content(obj: Any, where: str) -> ContentAnn:
    if not isinstance(obj, dict):
        raise SchemaShapeError(f"{where}: expected an object of arrays")
    for key, value in obj.items():
        if not isinstance(value, list):
            raise SchemaShapeError(f"{where}.{key}: expected an array, got {type(value).__name__}")
    if "bboxes" not in obj:
        raise SchemaShapeError(f"{where}: missing 'bboxes'")
    bboxes = tuple(_parse_box(b, f"{where}.bboxes[{i}]") for i, b in enumerate(obj["bboxes"]))
    texts = obj.get("texts")
    if texts is not None:
        for i, t in enumerate(texts):
            if not isinstance(t, str):
                raise SchemaShapeError(f"{where}.texts[{i}]: expected a string")
        texts = tuple(texts)
    labels = obj.get("labels")
    cells = obj.get("cells")
    extras = {k: _freeze(v) for k, v in obj.items() if k not in KNOWN_CONTENT_KEYS}
    return ContentAnn(
        bboxes=bboxes,
        texts=texts,
        labels=_freeze(labels) if labels is not None else None,
        cells=_freeze(cells) if cells is not None else None,
        extras=extras,
    )


def _parse_dim(rec: dict[str, Any], key: str, where: str) -> int:
    if key not in rec:
        raise SchemaShapeError(f"{where}: missing {key!r}")
    value = rec[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaShapeError(f"{where}.{key}: expected an integer, got {value!r}")
    if value <= 0:
        raise SchemaShapeError(f"{where}.{key}: must be positive, got {value}")
    return value


def parse_record(obj: Any, where: str = "record") -> ImageRecord:
    if not isinstance(obj, dict):
        raise SchemaShapeError(f"{where}: expected an object")
    if "content_ann" not in obj:
        raise SchemaShapeError(f"{where}: missing 'content_ann'")
    content2 = obj.get("content_ann2")
    return ImageRecord(
        height=_parse_dim(obj, "height", where),
        width=_parse_dim(obj, "width", where),
        content_ann=_parse_content(obj["content_ann"], f"{where}.content_ann"),
        content_ann2=None if content2 is None else _parse_content(content2, f"{where}.content_ann2"),
        extras={k: _freeze(v) for k, v in obj.items() if k not in KNOWN_RECORD_KEYS},
    )


def parse_annotation_file(data: bytes | str) -> AnnotationSet:
    """Parse UTF-8 annotation text into an :class:`AnnotationSet`.

    Raises:
        MalformedJson: the text is not valid JSON (NaN/Infinity included).
        SchemaShapeError: a record or content block has the wrong JSON types.
        DuplicateImagePath: an image path occurs twice at the top level.
    """
    top = _load_json(data)
    if not isinstance(top, dict):
        raise SchemaShapeError("top level must be an object keyed by image path")
    return AnnotationSet({path: parse_record(rec, path) for path, rec in top.items()})


def load_annotation_file(path: str) -> AnnotationSet:
    with open(path, "rb") as fh:
        return parse_annotation_file(fh.read())


# --- output ------------------------------------------------------------------


def canonical_dumps(obj: Any) -> str:
    """Sorted keys, 2-space indent, shortest round-trip floats, trailing newline."""
    return json.dumps(_thaw(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def serialize_canonical(annotations: AnnotationSet) -> str:
    return canonical_dumps(annotations.to_json())


def merge_sets(a: AnnotationSet, b: AnnotationSet) -> AnnotationSet:
    for path in b:
        if path in a:
            raise DuplicateImagePath(path)
    return AnnotationSet({**dict(a.items()), **dict(b.items())})


def full_image_record(width: int, height: int, **arrays: Any) -> ImageRecord:
    """Build a whole-image record: one box covering ``[0, 0, width, height]``.

    Each keyword is the single value of a length-1 parallel array, e.g.
    ``full_image_record(100, 32, texts="hello")``.
    """
    box = GeoBox((0, 0, width, height))
    known = {k: (_freeze(v),) for k, v in arrays.items() if k in KNOWN_CONTENT_KEYS}
    extras = {k: (_freeze(v),) for k, v in arrays.items() if k not in KNOWN_CONTENT_KEYS}
    return ImageRecord(height, width, ContentAnn(bboxes=(box,), extras=extras, **known))


def is_full_image(record: ImageRecord) -> bool:
    content = record.content_ann
    if len(content) != 1 or any(len(arr) != 1 for _, arr in content.arrays()):
        return False
    return content.bboxes[0].points == (0, 0, record.width, record.height)
