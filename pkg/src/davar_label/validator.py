"""Invariant checks for annotation records, reported as frozen diagnostic codes.

Codes (stable strings, safe to grep in CI logs):

==============  ========  ==========================================================
code            severity  raised when
==============  ========  ==========================================================
LENGTH_MISMATCH Error     a parallel array's length differs from ``len(bboxes)``
LABELS_NOT_2D   Error     a ``labels`` element is not a list of category strings
BAD_POLYGON     Error     a box has an illegal coordinate count or zero area
OUT_OF_BOUNDS   Warning   a box vertex lies outside ``[0, width] x [0, height]``
BAD_CELL        Error     a ``cells`` entry is not ``[r0, c0, r1, c1]`` with 0 <= r0 <= r1, 0 <= c0 <= c1
EMPTY_RECORD    Warning   a content block has no instances
==============  ========  ==========================================================
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Iterable

from .schema import AnnotationSet, ContentAnn, ImageRecord


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


LENGTH_MISMATCH = "LENGTH_MISMATCH"
LABELS_NOT_2D = "LABELS_NOT_2D"
BAD_POLYGON = "BAD_POLYGON"
OUT_OF_BOUNDS = "OUT_OF_BOUNDS"
BAD_CELL = "BAD_CELL"
EMPTY_RECORD = "EMPTY_RECORD"

CODES = {
    LENGTH_MISMATCH: Severity.ERROR,
    LABELS_NOT_2D: Severity.ERROR,
    BAD_POLYGON: Severity.ERROR,
    OUT_OF_BOUNDS: Severity.WARNING,
    BAD_CELL: Severity.ERROR,
    EMPTY_RECORD: Severity.WARNING,
}


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    image_path: str
    location: str
    message: str

    def to_json(self) -> dict[str, str]:
        out = asdict(self)
        out["severity"] = self.severity.value
        return out


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = ()
    counts: dict[str, int] = field(default_factory=lambda: {s.value: 0 for s in Severity})

    @classmethod
    def from_diagnostics(cls, diagnostics: Iterable[Diagnostic]) -> "ValidationReport":
        diags = tuple(diagnostics)
        counts = {s.value: 0 for s in Severity}
        for d in diags:
            counts[d.severity.value] += 1
        return cls(diags, counts)

    @property
    def errors(self) -> int:
        return self.counts[Severity.ERROR.value]

    @property
    def warnings(self) -> int:
        return self.counts[Severity.WARNING.value]

    def to_json_lines(self) -> str:
        return "".join(
            json.dumps(d.to_json(), sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"
            for d in self.diagnostics
        )


def _diag(code: str, path: str, location: str, message: str) -> Diagnostic:
    return Diagnostic(CODES[code], code, path, location, message)


def _is_index(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_content(path: str, level: str, content: ContentAnn, record: ImageRecord) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    n = len(content.bboxes)
    if n == 0:
        out.append(_diag(EMPTY_RECORD, path, level, f"{level} has no instances"))

    for key, arr in content.arrays():
        if len(arr) != n:
            out.append(
                _diag(LENGTH_MISMATCH, path, f"{level}.{key}",
                      f"{key} has {len(arr)} entries but bboxes has {n}")
            )

    for i, box in enumerate(content.bboxes):
        where = f"{level}.bboxes[{i}]"
        problem = box.problem()
        if problem is not None:
            out.append(_diag(BAD_POLYGON, path, where, problem))
            continue
        xs, ys = box.points[0::2], box.points[1::2]
        if min(xs) < 0 or min(ys) < 0 or max(xs) > record.width or max(ys) > record.height:
            out.append(
                _diag(OUT_OF_BOUNDS, path, where,
                      f"box extends outside the {record.width}x{record.height} image")
            )

    for i, label in enumerate(content.labels or ()):
        if not isinstance(label, tuple):
            out.append(_diag(LABELS_NOT_2D, path, f"{level}.labels[{i}]",
                             f"expected a list of categories, got {label!r}"))
        elif not all(isinstance(c, str) for c in label):
            out.append(_diag(LABELS_NOT_2D, path, f"{level}.labels[{i}]",
                             "label categories must be strings"))

    for i, cell in enumerate(content.cells or ()):
        where = f"{level}.cells[{i}]"
        if not (isinstance(cell, tuple) and len(cell) == 4 and all(_is_index(v) for v in cell)):
            out.append(_diag(BAD_CELL, path, where, f"expected 4 integers, got {cell!r}"))
            continue
        r0, c0, r1, c1 = cell
        if not (0 <= r0 <= r1 and 0 <= c0 <= c1):
            out.append(_diag(BAD_CELL, path, where,
                             f"need 0 <= start_row <= end_row and 0 <= start_col <= end_col, got {list(cell)}"))
    return out


def validate_record(path: str, record: ImageRecord) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    for level, content in record.levels():
        diagnostics.extend(_check_content(path, level, content, record))
    return diagnostics


def validate_set(annotations: AnnotationSet, max_workers: int | None = None) -> ValidationReport:
    """Validate every record; diagnostics come out in canonical path order."""
    items = list(annotations.items())
    if max_workers and max_workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            chunks = list(pool.map(lambda kv: validate_record(*kv), items))
    else:
        chunks = [validate_record(p, r) for p, r in items]
    return ValidationReport.from_diagnostics(d for chunk in chunks for d in chunk)
