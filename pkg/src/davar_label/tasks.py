"""Per-task projections of an :class:`ImageRecord`.

Each task form reads a fixed subset of the content arrays. ``project`` pulls
exactly those arrays out of a record and zips them into per-instance dicts,
so a detection sample carries only boxes while a KIE sample carries boxes,
texts and label vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import InvalidRecord, MissingRequiredKey, SubtaskIndexOutOfRange
from .schema import AnnotationSet, ContentAnn, ImageRecord, _thaw


class TaskKind(str, Enum):
    DETECTION = "detection"
    RECOGNITION = "recognition"
    SPOTTING = "spotting"
    VIDEO_TEXT = "video_text"
    KIE = "kie"
    NER = "ner"
    LAYOUT_ANALYSIS = "layout_analysis"
    READING_ORDER = "reading_order"
    TABLE_RECOGNITION = "table_recognition"

    @classmethod
    def parse(cls, name: "str | TaskKind") -> "TaskKind":
        if isinstance(name, TaskKind):
            return name
        key = name.strip().lower().replace("-", "_")
        aliases = {"layout": "layout_analysis", "table": "table_recognition",
                   "rod": "reading_order", "video": "video_text"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown task {name!r}; choose from {[t.value for t in cls]}") from None


_REQUIRED: dict[TaskKind, tuple[str, ...]] = {
    TaskKind.DETECTION: ("bboxes",),
    TaskKind.RECOGNITION: ("texts",),
    TaskKind.SPOTTING: ("bboxes", "texts"),
    TaskKind.VIDEO_TEXT: ("bboxes", "texts", "track_id", "frame"),
    TaskKind.KIE: ("bboxes", "texts", "labels"),
    TaskKind.NER: ("tokens", "tags"),
    TaskKind.LAYOUT_ANALYSIS: ("bboxes", "labels"),
    TaskKind.READING_ORDER: ("bboxes", "order"),
    TaskKind.TABLE_RECOGNITION: ("bboxes", "texts", "cells"),
}

# Instance field name for each content key; unlisted keys keep their name.
FIELD_NAMES = {"bboxes": "box", "texts": "text", "cells": "cell"}

LABEL_TASKS = frozenset(t for t, keys in _REQUIRED.items() if "labels" in keys)


def required_keys(task: TaskKind | str) -> frozenset[str]:
    """Content-array names a task needs.

    Extra arrays (``order``, ``track_id``, ``frame``, ``tokens``, ``tags``)
    are named by their key inside ``content_ann``.
    """
    return frozenset(_REQUIRED[TaskKind.parse(task)])


@dataclass(frozen=True)
class TaskSample:
    """Task-specific view of one record.

    ``instances`` holds one mapping per box, keyed by field name (``box``,
    ``text``, ``labels``, ``cell``, ``order``, ...). ``instances2`` is filled
    for two-level layout samples.
    """

    task: TaskKind
    instances: tuple[Mapping[str, Any], ...]
    levels: int = 1
    instances2: Optional[tuple[Mapping[str, Any], ...]] = None
    chargrid: Optional[Any] = None

    def column(self, key: str, level: int = 1) -> tuple[Any, ...]:
        """Reassemble the source array ``key`` from the instances."""
        rows = self.instances if level == 1 else (self.instances2 or ())
        name = FIELD_NAMES.get(key, key)
        return tuple(inst[name] for inst in rows)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "task": self.task.value,
            "levels": self.levels,
            "instances": [_thaw(dict(i)) for i in self.instances],
        }
        if self.instances2 is not None:
            out["instances2"] = [_thaw(dict(i)) for i in self.instances2]
        if self.chargrid is not None:
            out["chargrid"] = self.chargrid.to_json()
        return out


def _project_level(content: ContentAnn, task: TaskKind, level: str) -> tuple[dict[str, Any], ...]:
    keys = _REQUIRED[task]
    columns = []
    for key in keys:
        arr = content.get(key)
        if arr is None:
            raise MissingRequiredKey(key if level == "content_ann" else f"{level}.{key}", task.value)
        columns.append(arr)
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise InvalidRecord(f"{level}: arrays {list(keys)} have unequal lengths {sorted(lengths)}")
    names = [FIELD_NAMES.get(k, k) for k in keys]
    return tuple(dict(zip(names, row)) for row in zip(*columns))


def project(record: ImageRecord, task: TaskKind | str) -> TaskSample:
    """Project ``record`` onto the fields ``task`` needs.

    Raises:
        MissingRequiredKey: a required array is absent.
        InvalidRecord: required arrays disagree in length, or reading-order
            ranks are not distinct integers.
    """
    task = TaskKind.parse(task)
    instances = _project_level(record.content_ann, task, "content_ann")
    if task is TaskKind.READING_ORDER:
        order = [inst["order"] for inst in instances]
        if any(not isinstance(o, int) or isinstance(o, bool) for o in order) or len(set(order)) != len(order):
            raise InvalidRecord(f"reading order must be distinct integers, got {order}")
    if task is TaskKind.LAYOUT_ANALYSIS and record.content_ann2 is not None:
        level2 = _project_level(record.content_ann2, task, "content_ann2")
        return TaskSample(task, instances, levels=2, instances2=level2)
    return TaskSample(task, instances)


def label_vocabulary(
    annotations: AnnotationSet, task: TaskKind | str, subtask_index: int, level: int = 1
) -> list[str]:
    """Sorted unique categories at label position ``subtask_index``.

    Raises:
        ValueError: ``task`` does not use labels.
        MissingRequiredKey: a record has no ``labels`` array.
        SubtaskIndexOutOfRange: some label vector is too short for the index.
    """
    task = TaskKind.parse(task)
    if task not in LABEL_TASKS:
        raise ValueError(f"task {task.value!r} has no labels")
    if subtask_index < 0:
        raise SubtaskIndexOutOfRange(f"subtask index {subtask_index} is negative")
    seen: set[str] = set()
    for path, record in annotations.items():
        content = record.content_ann if level == 1 else record.content_ann2
        if content is None:
            continue
        if content.labels is None:
            raise MissingRequiredKey("labels", task.value)
        for i, vector in enumerate(content.labels):
            if subtask_index >= len(vector):
                raise SubtaskIndexOutOfRange(
                    f"{path}: labels[{i}] has {len(vector)} subtasks, index {subtask_index} requested"
                )
            seen.add(vector[subtask_index])
    return sorted(seen)

