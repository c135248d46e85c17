from .coco import CocoDetectionDoc, from_coco_detection, to_coco_detection
from .conll import conll_from, ner_to_conll
from .icdar import from_icdar_spotting, icdar_to_record, record_to_icdar, to_icdar_spotting

__all__ = [
    "CocoDetectionDoc",
    "conll_from",
    "from_coco_detection",
    "from_icdar_spotting",
    "icdar_to_record",
    "ner_to_conll",
    "record_to_icdar",
    "to_coco_detection",
    "to_icdar_spotting",
]
