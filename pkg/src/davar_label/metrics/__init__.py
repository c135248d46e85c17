from .detection import (
    COCO_IOU_THRESHOLDS,
    DetectionScore,
    Matching,
    Prediction,
    average_precision,
    coco_class_aps,
    coco_map,
    detection_prf,
    match_detections,
)
from .iou import polygon_iou
from .kie import ClassScore, kie_class_scores, kie_macro_f1
from .order import reading_order_tau
from .report import EvalReport, evaluate

__all__ = [
    "COCO_IOU_THRESHOLDS",
    "ClassScore",
    "DetectionScore",
    "EvalReport",
    "Matching",
    "Prediction",
    "average_precision",
    "coco_class_aps",
    "coco_map",
    "detection_prf",
    "evaluate",
    "kie_class_scores",
    "kie_macro_f1",
    "match_detections",
    "polygon_iou",
    "reading_order_tau",
]
