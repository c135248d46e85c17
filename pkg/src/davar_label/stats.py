"""Dataset summary numbers for ``davar-label stats``."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import InvalidBox
from .schema import AnnotationSet

AREA_BINS = 10


@dataclass
class StatsSummary:
    num_images: int = 0
    num_instances: int = 0
    num_instances_level2: int = 0
    # subtask index -> category -> count
    categories: dict[int, Counter] = field(default_factory=dict)
    # box area as a fraction of image area, in tenths; last bin also holds > 1
    box_area_deciles: list[int] = field(default_factory=lambda: [0] * AREA_BINS)
    text_lengths: Counter = field(default_factory=Counter)

    def to_json(self) -> dict[str, Any]:
        return {
            "num_images": self.num_images,
            "num_instances": self.num_instances,
            "num_instances_level2": self.num_instances_level2,
            "categories": {str(k): dict(sorted(v.items())) for k, v in sorted(self.categories.items())},
            "box_area_histogram": {
                "bin_edges": [i / AREA_BINS for i in range(AREA_BINS + 1)],
                "counts": list(self.box_area_deciles),
            },
            "text_length_histogram": [[n, c] for n, c in sorted(self.text_lengths.items())],
        }


def _area_bin(area: float, image_area: int) -> int:
    if not math.isfinite(area):
        return AREA_BINS - 1
    return min(AREA_BINS - 1, math.floor(Fraction(area) * AREA_BINS / image_area))


def compute_stats(annotations: AnnotationSet) -> StatsSummary:
    summary = StatsSummary(num_images=len(annotations))
    for rec in annotations.values():
        content = rec.content_ann
        summary.num_instances += len(content.bboxes)
        if rec.content_ann2 is not None:
            summary.num_instances_level2 += len(rec.content_ann2.bboxes)
        for box in content.bboxes:
            try:
                area = box.area()
            except InvalidBox:
                area = 0.0
            summary.box_area_deciles[_area_bin(area, rec.width * rec.height)] += 1
        for vector in content.labels or ():
            if isinstance(vector, tuple):
                for k, cat in enumerate(vector):
                    summary.categories.setdefault(k, Counter())[str(cat)] += 1
        for text in content.texts or ():
            summary.text_lengths[len(text)] += 1
    return summary


def format_stats(summary: StatsSummary) -> str:
    lines = [
        f"images          {summary.num_images}",
        f"instances       {summary.num_instances}",
        f"instances (L2)  {summary.num_instances_level2}",
        "",
        "box area / image area",
    ]
    for i, count in enumerate(summary.box_area_deciles):
        lines.append(f"  [{i / AREA_BINS:.1f}, {(i + 1) / AREA_BINS:.1f})  {count}")
    for k, counter in sorted(summary.categories.items()):
        lines += ["", f"categories, subtask {k}"]
        lines += [f"  {name:<20} {n}" for name, n in sorted(counter.items())]
    if summary.text_lengths:
        lines += ["", "text length"]
        lines += [f"  {n:>4}  {c}" for n, c in sorted(summary.text_lengths.items())]
    return "\n".join(lines) + "\n"
