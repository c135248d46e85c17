"""Chargrid: a page-sized grid of character codes painted from text boxes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import MissingTexts
from ..schema import ImageRecord


@dataclass(frozen=True)
class CharGrid:
    height: int
    width: int
    cells: tuple[int, ...]  # row-major; 0 is background, k is vocab[k - 1]

    def row(self, r: int) -> tuple[int, ...]:
        return self.cells[r * self.width:(r + 1) * self.width]

    def to_json(self) -> dict:
        return {"height": self.height, "width": self.width, "cells": list(self.cells)}


def _first_center_at_or_after(edge: float) -> int:
    """Smallest integer ``c`` with ``c + 0.5 >= edge``."""
    c = math.ceil(edge - 0.5)
    while c - 0.5 >= edge:
        c -= 1
    while c + 0.5 < edge:
        c += 1
    return c


def _center_span(lo: float, hi: float, limit: int) -> tuple[int, int]:
    """Cells whose centre lies in ``[lo, hi)``, clipped to ``[0, limit)``."""
    start = max(_first_center_at_or_after(lo), 0)
    stop = min(_first_center_at_or_after(hi), limit)
    return start, max(start, stop)


def chargrid_rasterize(record: ImageRecord, vocab: Sequence[str], out_w: int, out_h: int) -> CharGrid:
    """Paint every text box of ``record`` into an ``out_w`` x ``out_h`` grid.

    Each box's axis-aligned hull is scaled into grid units and split into
    ``len(text)`` equal slices left to right. A cell belongs to a slice when
    its centre falls inside the slice (half-open on the right and bottom).
    Boxes are painted in annotation order, so later boxes win on overlap.
    Characters outside ``vocab`` paint background.
    """
    if not vocab:
        raise ValueError("vocabulary must be non-empty")
    if len(set(vocab)) != len(vocab):
        raise ValueError("vocabulary contains duplicate characters")
    if out_w <= 0 or out_h <= 0:
        raise ValueError(f"grid size must be positive, got {out_w}x{out_h}")
    content = record.content_ann
    if content.texts is None:
        raise MissingTexts("chargrid needs a 'texts' array")
    if len(content.texts) != len(content.bboxes):
        raise MissingTexts(f"{len(content.texts)} texts for {len(content.bboxes)} boxes")

    codes = {ch: i + 1 for i, ch in enumerate(vocab)}
    grid = np.zeros((out_h, out_w), dtype=np.int64)
    sx = out_w / record.width
    sy = out_h / record.height
    for box, text in zip(content.bboxes, content.texts):
        if not text:
            continue
        x1, y1, x2, y2 = box.hull()
        gx1, gx2 = x1 * sx, x2 * sx
        r0, r1 = _center_span(y1 * sy, y2 * sy, out_h)
        if r0 == r1:
            continue
        step = (gx2 - gx1) / len(text)
        for j, ch in enumerate(text):
            c0, c1 = _center_span(gx1 + j * step, gx1 + (j + 1) * step, out_w)
            if c0 < c1:
                grid[r0:r1, c0:c1] = codes.get(ch, 0)
    return CharGrid(out_h, out_w, tuple(int(v) for v in grid.ravel()))
