"""Box matching, detection precision/recall/hmean, AP and COCO-style mAP."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..geometry import GeoBox
from .iou import polygon_iou

# Decimal thresholds 0.50, 0.55, ..., 0.95 (rounded, not accumulated).
COCO_IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
RECALL_STEPS = 100  # recall points k / 100 for k = 0..100


@dataclass(frozen=True)
class Prediction:
    box: GeoBox
    score: float
    category: str = ""
    text: Optional[str] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class Matching:
    """Greedy matching of one image's predictions against its ground truth.

    ``order`` lists prediction indices by descending score; ``tp`` and
    ``matched_gt`` are aligned with ``order``.
    """

    order: tuple[int, ...]
    tp: tuple[bool, ...]
    matched_gt: tuple[Optional[int], ...]
    num_gt: int

    @property
    def num_tp(self) -> int:
        return sum(self.tp)

    @property
    def num_fp(self) -> int:
        return len(self.tp) - self.num_tp

    @property
    def num_fn(self) -> int:
        return self.num_gt - self.num_tp


def rank_by_score(scores: Sequence[float]) -> list[int]:
    """Indices by descending score; ties keep input order."""
    return sorted(range(len(scores)), key=lambda i: -scores[i])


def match_detections(
    preds: Sequence[Prediction], gts: Sequence[GeoBox], iou_thresh: float = 0.5
) -> Matching:
    """Greedily match predictions to ground truth, highest score first.

    Each prediction takes the still-unmatched ground-truth box with the
    highest IoU at or above ``iou_thresh`` (lowest index on ties).
    """
    if not 0.0 < iou_thresh <= 1.0:
        raise ValueError(f"iou_thresh must be in (0, 1], got {iou_thresh}")
    order = rank_by_score([p.score for p in preds])
    ious = [[polygon_iou(preds[i].box, g) for g in gts] for i in order]
    return _greedy(order, ious, len(gts), iou_thresh)


def _greedy(order: list[int], ious: list[list[float]], num_gt: int, thresh: float) -> Matching:
    taken = [False] * num_gt
    tp: list[bool] = []
    matched: list[Optional[int]] = []
    for row in ious:
        best, best_iou = None, thresh
        for g, iou in enumerate(row):
            if not taken[g] and iou >= best_iou and (best is None or iou > best_iou):
                best, best_iou = g, iou
        if best is not None:
            taken[best] = True
        tp.append(best is not None)
        matched.append(best)
    return Matching(tuple(order), tuple(tp), tuple(matched), num_gt)


@dataclass(frozen=True)
class DetectionScore:
    precision: float
    recall: float
    hmean: float
    tp: int
    fp: int
    fn: int


def prf(tp: int, fp: int, fn: int) -> DetectionScore:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    # 2PR / (P + R) written in counts, so it is rounded once
    hmean = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    return DetectionScore(precision, recall, hmean, tp, fp, fn)


def detection_prf(matchings: Iterable[Matching]) -> DetectionScore:
    """Pool matchings over a set; 0 wherever a denominator is 0."""
    tp = fp = fn = 0
    for m in matchings:
        tp += m.num_tp
        fp += m.num_fp
        fn += m.num_fn
    return prf(tp, fp, fn)


def average_precision(flags: Sequence[bool], num_gt: int) -> float:
    """101-point interpolated AP of a ranked TP/FP list.

    Precision at each recall point ``k / 100`` is the best precision reached
    at any recall at or above it (0 if that recall is never reached). Recall
    comparisons are done in integers, so ``29 / 100`` reaches point 0.29.
    Returns 0.0 when ``num_gt`` is 0.
    """
    if num_gt < 0:
        raise ValueError("num_gt must be non-negative")
    if num_gt == 0 or not len(flags):
        return 0.0
    tp = np.cumsum(np.asarray(flags, dtype=np.int64))
    if tp[-1] > num_gt:
        raise ValueError(f"{tp[-1]} true positives exceed num_gt={num_gt}")
    fp = np.arange(1, len(tp) + 1) - tp
    precision = tp / (tp + fp)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    # first rank whose recall tp/num_gt reaches k/100
    idx = np.searchsorted(tp * RECALL_STEPS, np.arange(RECALL_STEPS + 1) * num_gt, side="left")
    sampled = np.where(idx < len(envelope), envelope[np.minimum(idx, len(envelope) - 1)], 0.0)
    return float(sampled.sum() / (RECALL_STEPS + 1))


ImageDetections = Mapping[str, Sequence[Prediction]]
ImageTruth = Mapping[str, Sequence[tuple[GeoBox, str]]]


def _class_ap_per_threshold(
    preds: ImageDetections, gts: ImageTruth, category: str, thresholds: Sequence[float]
) -> list[float]:
    """AP of one category at each threshold, pooled over images."""
    per_image = []
    num_gt = 0
    for image in sorted(set(preds) | set(gts)):
        g = [box for box, cat in gts.get(image, ()) if cat == category]
        p = [pr for pr in preds.get(image, ()) if pr.category == category]
        num_gt += len(g)
        order = rank_by_score([pr.score for pr in p])
        ious = [[polygon_iou(p[i].box, box) for box in g] for i in order]
        per_image.append((p, order, ious, len(g)))
    aps = []
    for t in thresholds:
        scored: list[tuple[float, bool]] = []
        for p, order, ious, n in per_image:
            m = _greedy(order, ious, n, t)
            scored.extend((p[i].score, hit) for i, hit in zip(m.order, m.tp))
        ranked = [scored[i][1] for i in rank_by_score([s for s, _ in scored])]
        aps.append(average_precision(ranked, num_gt))
    return aps


def coco_class_aps(
    preds: ImageDetections,
    gts: ImageTruth,
    thresholds: Sequence[float] = COCO_IOU_THRESHOLDS,
) -> dict[str, float]:
    """Per-class AP averaged over ``thresholds``, for classes in the ground truth."""
    categories = sorted({cat for boxes in gts.values() for _, cat in boxes})
    out = {}
    for cat in categories:
        aps = _class_ap_per_threshold(preds, gts, cat, thresholds)
        out[cat] = sum(aps) / len(aps)
    return out


def coco_map(
    preds: ImageDetections,
    gts: ImageTruth,
    thresholds: Sequence[float] = COCO_IOU_THRESHOLDS,
) -> float:
    """COCO-style mAP: per-class AP over IoU thresholds, averaged over gt classes.

    ``preds`` maps image path to predictions, ``gts`` maps image path to
    ``(box, category)`` pairs. Images are visited in sorted path order and
    detections are ranked by score with ties in that visiting order. No gt
    classes gives 0.0.
    """
    per_class = coco_class_aps(preds, gts, thresholds)
    if not per_class:
        return 0.0
    return sum(per_class.values()) / len(per_class)
