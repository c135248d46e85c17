"""Evaluation runs over annotation sets, producing an :class:`EvalReport`.

Prediction files use the annotation format; a ``scores`` array parallel to
``bboxes`` carries confidences (missing scores count as 1.0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import InvalidRecord, LengthMismatch, MissingRequiredKey, SubtaskIndexOutOfRange
from ..schema import AnnotationSet, ContentAnn
from ..tasks import TaskKind
from .detection import Prediction, coco_class_aps, detection_prf, match_detections, prf
from .kie import kie_class_scores
from .order import reading_order_tau

HEADLINE = {
    TaskKind.KIE: ("F1-Score", "macro_f1"),
    TaskKind.LAYOUT_ANALYSIS: ("mAP", "map"),
    TaskKind.DETECTION: ("hmean", "hmean"),
    TaskKind.READING_ORDER: ("tau", "tau"),
}


@dataclass
class EvalReport:
    task: TaskKind
    per_class: dict[str, dict[str, Optional[float]]] = field(default_factory=dict)
    aggregate: dict[str, Optional[float]] = field(default_factory=dict)
    counts: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def headline(self) -> tuple[str, Optional[float]]:
        name, key = HEADLINE[self.task]
        return name, self.aggregate.get(key)

    def to_json(self) -> dict[str, Any]:
        name, value = self.headline
        return {
            "task": self.task.value,
            "per_class": self.per_class,
            "aggregate": {**self.aggregate, name: value},
            "counts": self.counts,
        }


def _categories(content: ContentAnn, subtask: int, where: str) -> list[str]:
    if content.labels is None:
        raise MissingRequiredKey("labels", where)
    if len(content.labels) != len(content.bboxes):
        raise InvalidRecord(f"{where}: {len(content.labels)} labels for {len(content.bboxes)} boxes")
    out = []
    for i, vector in enumerate(content.labels):
        if not 0 <= subtask < len(vector):
            raise SubtaskIndexOutOfRange(f"{where}: labels[{i}] has no subtask {subtask}")
        out.append(vector[subtask])
    return out


def _scores(content: ContentAnn) -> list[float]:
    scores = content.extras.get("scores")
    if scores is None:
        return [1.0] * len(content.bboxes)
    if len(scores) != len(content.bboxes):
        raise LengthMismatch(f"{len(scores)} scores for {len(content.bboxes)} boxes")
    return [float(s) for s in scores]


def _predictions(content: ContentAnn, subtask: Optional[int], where: str) -> list[Prediction]:
    cats = _categories(content, subtask, where) if subtask is not None else [""] * len(content.bboxes)
    return [Prediction(b, s, c) for b, s, c in zip(content.bboxes, _scores(content), cats)]


def evaluate_kie(gt: AnnotationSet, pred: AnnotationSet, subtask: int = 0,
                 vocab: Optional[list[str]] = None) -> EvalReport:
    """Per-box classification with ground-truth boxes given; boxes align by index."""
    gt_labels: list[str] = []
    pred_labels: list[str] = []
    for path, rec in gt.items():
        if path not in pred:
            raise LengthMismatch(f"no prediction for {path!r}")
        g = _categories(rec.content_ann, subtask, path)
        p = _categories(pred[path].content_ann, subtask, f"prediction {path}")
        if len(g) != len(p):
            raise LengthMismatch(f"{path}: {len(p)} predicted boxes for {len(g)} ground-truth boxes")
        gt_labels += g
        pred_labels += p
    scores = kie_class_scores(pred_labels, gt_labels, vocab)
    report = EvalReport(TaskKind.KIE)
    for cat, s in scores.items():
        report.per_class[cat] = {"precision": s.precision, "recall": s.recall, "f1": s.f1, "ap": None}
        report.counts[cat] = {"tp": s.tp, "fp": s.fp, "fn": s.fn}
    macro = sum(s.f1 for s in scores.values()) / len(scores) if scores else 0.0
    report.aggregate = {"macro_f1": macro, "map": None, "hmean": None}
    return report


def evaluate_layout(gt: AnnotationSet, pred: AnnotationSet, subtask: int = 0,
                    iou: float = 0.5) -> EvalReport:
    """COCO-style mAP plus per-class precision/recall/F1 at ``iou``."""
    truth = {p: list(zip(r.content_ann.bboxes, _categories(r.content_ann, subtask, p)))
             for p, r in gt.items()}
    dets = {p: _predictions(r.content_ann, subtask, f"prediction {p}") for p, r in pred.items()}
    aps = coco_class_aps(dets, truth)
    report = EvalReport(TaskKind.LAYOUT_ANALYSIS)
    tot_tp = tot_fp = tot_fn = 0
    for cat in sorted(aps):
        matchings = []
        for image in sorted(set(truth) | set(dets)):
            g = [b for b, c in truth.get(image, ()) if c == cat]
            d = [x for x in dets.get(image, ()) if x.category == cat]
            matchings.append(match_detections(d, g, iou))
        s = detection_prf(matchings)
        tot_tp, tot_fp, tot_fn = tot_tp + s.tp, tot_fp + s.fp, tot_fn + s.fn
        report.per_class[cat] = {"precision": s.precision, "recall": s.recall, "f1": s.hmean, "ap": aps[cat]}
        report.counts[cat] = {"tp": s.tp, "fp": s.fp, "fn": s.fn}
    n = len(aps)
    report.aggregate = {
        "macro_f1": sum(v["f1"] for v in report.per_class.values()) / n if n else 0.0,  # type: ignore[misc]
        "map": sum(aps.values()) / n if n else 0.0,
        "hmean": prf(tot_tp, tot_fp, tot_fn).hmean,
    }
    return report


def evaluate_detection(gt: AnnotationSet, pred: AnnotationSet, iou: float = 0.5) -> EvalReport:
    """Class-agnostic precision, recall and hmean pooled over images."""
    matchings = []
    for image in sorted(set(gt) | set(pred)):
        g = list(gt[image].content_ann.bboxes) if image in gt else []
        d = _predictions(pred[image].content_ann, None, image) if image in pred else []
        matchings.append(match_detections(d, g, iou))
    s = detection_prf(matchings)
    report = EvalReport(TaskKind.DETECTION)
    report.counts["all"] = {"tp": s.tp, "fp": s.fp, "fn": s.fn}
    report.aggregate = {"macro_f1": None, "map": None, "hmean": s.hmean,
                        "precision": s.precision, "recall": s.recall}
    return report


def evaluate_reading_order(gt: AnnotationSet, pred: AnnotationSet) -> EvalReport:
    """Mean Kendall tau over images."""
    taus = []
    for path, rec in gt.items():
        if path not in pred:
            raise LengthMismatch(f"no prediction for {path!r}")
        g = rec.content_ann.extras.get("order")
        p = pred[path].content_ann.extras.get("order")
        if g is None or p is None:
            raise MissingRequiredKey("order", TaskKind.READING_ORDER.value)
        taus.append(reading_order_tau(list(p), list(g)))
    report = EvalReport(TaskKind.READING_ORDER)
    report.aggregate = {"macro_f1": None, "map": None, "hmean": None,
                        "tau": sum(taus) / len(taus) if taus else 0.0}
    return report


def evaluate(task: TaskKind | str, gt: AnnotationSet, pred: AnnotationSet,
             subtask: int = 0, iou: float = 0.5) -> EvalReport:
    task = TaskKind.parse(task)
    if task is TaskKind.KIE:
        return evaluate_kie(gt, pred, subtask)
    if task is TaskKind.LAYOUT_ANALYSIS:
        return evaluate_layout(gt, pred, subtask, iou)
    if task is TaskKind.DETECTION:
        return evaluate_detection(gt, pred, iou)
    if task is TaskKind.READING_ORDER:
        return evaluate_reading_order(gt, pred)
    raise ValueError(f"no evaluation defined for task {task.value!r}")
