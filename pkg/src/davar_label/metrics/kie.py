"""Per-box classification scores for key information extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..errors import LengthMismatch


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def kie_class_scores(
    pred_labels: Sequence[str], gt_labels: Sequence[str], vocab: Optional[Iterable[str]] = None
) -> dict[str, ClassScore]:
    """Per-class scores over classes present in ``gt_labels`` (and in ``vocab`` if given).

    A box predicted as class A with truth B counts one FP for A and one FN
    for B; boxes whose classes are both out of scope contribute nothing.
    """
    if len(pred_labels) != len(gt_labels):
        raise LengthMismatch(f"{len(pred_labels)} predictions for {len(gt_labels)} ground-truth boxes")
    classes = set(gt_labels)
    if vocab is not None:
        classes &= set(vocab)
    tp = dict.fromkeys(classes, 0)
    fp = dict.fromkeys(classes, 0)
    fn = dict.fromkeys(classes, 0)
    for pred, gt in zip(pred_labels, gt_labels):
        if pred == gt:
            if gt in classes:
                tp[gt] += 1
            continue
        if pred in classes:
            fp[pred] += 1
        if gt in classes:
            fn[gt] += 1
    out = {}
    for c in sorted(classes):
        p = tp[c] / (tp[c] + fp[c]) if tp[c] + fp[c] else 0.0
        r = tp[c] / (tp[c] + fn[c]) if tp[c] + fn[c] else 0.0
        f1 = 2 * tp[c] / (2 * tp[c] + fp[c] + fn[c]) if tp[c] + fp[c] + fn[c] else 0.0
        out[c] = ClassScore(p, r, f1, tp[c], fp[c], fn[c])
    return out


def kie_macro_f1(
    pred_labels: Sequence[str], gt_labels: Sequence[str], vocab: Optional[Iterable[str]] = None
) -> float:
    """Macro-averaged F1; 0.0 when no class is in scope."""
    scores = kie_class_scores(pred_labels, gt_labels, vocab)
    if not scores:
        return 0.0
    return sum(s.f1 for s in scores.values()) / len(scores)
