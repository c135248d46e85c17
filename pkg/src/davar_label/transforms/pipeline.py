"""Stage registry and config-driven pipelines.

A pipeline config is JSON::

    {"seed": 0, "stages": [{"type": "Resize", "width": 512, "height": 512},
                           {"type": "ChargridRasterize", "vocab": "0123456789", "width": 64, "height": 64},
                           {"type": "SelectKeys", "task": "kie"}]}

Stages are frozen dataclasses registered by name. Their fields are the
stage parameters; ``check`` validates them when the pipeline is built.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Union

from ..errors import BadStageParams, DavarLabelError, UnknownStage
from ..schema import ImageRecord
from ..tasks import TaskKind, TaskSample, project
from .chargrid import CharGrid, chargrid_rasterize
from .geometric import apply_hflip, apply_resize, apply_rotate90, apply_vflip

PipelineOutput = Union[ImageRecord, TaskSample, CharGrid]

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class State:
    """What flows between stages."""

    record: ImageRecord
    path: str = ""
    chargrid: CharGrid | None = None
    sample: TaskSample | None = None


class Stage:
    # Stages that leave geometry untouched may follow ChargridRasterize.
    keeps_geometry = False

    def check(self) -> None:
        """Raise ``ValueError`` with a reason when parameters are invalid."""

    def __call__(self, state: State) -> State:
        raise NotImplementedError


_REGISTRY: dict[str, Callable[..., Stage]] = {}


def register_stage(name: str, factory: Callable[..., Stage] | None = None):
    """Register ``factory`` under ``name``; usable as a class decorator."""

    def deco(f: Callable[..., Stage]) -> Callable[..., Stage]:
        if name in _REGISTRY and _REGISTRY[name] is not f:
            raise ValueError(f"stage {name!r} is already registered")
        _REGISTRY[name] = f
        return f

    return deco(factory) if factory is not None else deco


def registered_stages() -> list[str]:
    return sorted(_REGISTRY)


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


@register_stage("Resize")
@dataclass(frozen=True)
class Resize(Stage):
    width: int
    height: int

    def check(self) -> None:
        if not (_is_int(self.width) and _is_int(self.height)) or self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive integers")

    def __call__(self, state: State) -> State:
        return dataclasses.replace(state, record=apply_resize(state.record, self.width, self.height))


@register_stage("HFlip")
@dataclass(frozen=True)
class HFlip(Stage):
    def __call__(self, state: State) -> State:
        return dataclasses.replace(state, record=apply_hflip(state.record))


@register_stage("VFlip")
@dataclass(frozen=True)
class VFlip(Stage):
    def __call__(self, state: State) -> State:
        return dataclasses.replace(state, record=apply_vflip(state.record))


@register_stage("Rotate90")
@dataclass(frozen=True)
class Rotate90(Stage):
    k: int = 1

    def check(self) -> None:
        if not _is_int(self.k) or self.k not in (1, 2, 3):
            raise ValueError("k must be 1, 2 or 3")

    def __call__(self, state: State) -> State:
        return dataclasses.replace(state, record=apply_rotate90(state.record, self.k))


@register_stage("ChargridRasterize")
@dataclass(frozen=True)
class ChargridRasterize(Stage):
    vocab: tuple[str, ...]
    width: int
    height: int
    keeps_geometry = True

    def __post_init__(self) -> None:
        # A string is shorthand for its characters.
        if isinstance(self.vocab, str):
            object.__setattr__(self, "vocab", tuple(self.vocab))
        elif isinstance(self.vocab, list):
            object.__setattr__(self, "vocab", tuple(self.vocab))

    def check(self) -> None:
        if not isinstance(self.vocab, tuple) or not self.vocab:
            raise ValueError("vocab must be a non-empty string or list of characters")
        if not all(isinstance(c, str) and len(c) == 1 for c in self.vocab):
            raise ValueError("vocab entries must be single characters")
        if len(set(self.vocab)) != len(self.vocab):
            raise ValueError("vocab contains duplicates")
        if not (_is_int(self.width) and _is_int(self.height)) or self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive integers")

    def __call__(self, state: State) -> State:
        grid = chargrid_rasterize(state.record, self.vocab, self.width, self.height)
        return dataclasses.replace(state, chargrid=grid)


@register_stage("SelectKeys")
@dataclass(frozen=True)
class SelectKeys(Stage):
    task: str
    keeps_geometry = True

    def check(self) -> None:
        if not isinstance(self.task, str):
            raise ValueError("task must be a string")
        TaskKind.parse(self.task)

    def __call__(self, state: State) -> State:
        sample = project(state.record, self.task)
        if state.chargrid is not None:
            sample = dataclasses.replace(sample, chargrid=state.chargrid)
        return dataclasses.replace(state, sample=sample)


@dataclass(frozen=True)
class StageConfig:
    type: str
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class PipelineConfig:
    stages: tuple[StageConfig, ...]
    seed: int = 0

    @classmethod
    def from_json(cls, obj: Any) -> "PipelineConfig":
        if not isinstance(obj, dict) or not isinstance(obj.get("stages"), list):
            raise BadStageParams("pipeline", "config must be an object with a 'stages' list")
        stages = []
        for i, raw in enumerate(obj["stages"]):
            if not isinstance(raw, dict) or not isinstance(raw.get("type"), str):
                raise BadStageParams(f"stages[{i}]", "each stage needs a string 'type'")
            params = {k: v for k, v in raw.items() if k != "type"}
            stages.append(StageConfig(raw["type"], params))
        return cls(tuple(stages), obj.get("seed", 0))

    @classmethod
    def load(cls, path: str) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Pipeline:
    stages: tuple[Stage, ...]
    seed: int = 0

    def __len__(self) -> int:
        return len(self.stages)

    def __call__(self, record: ImageRecord, path: str = "") -> PipelineOutput:
        return run_pipeline(self, record, path)


def build_pipeline(config: PipelineConfig) -> Pipeline:
    """Instantiate and check every stage of ``config``.

    Raises:
        UnknownStage: a stage type is not registered.
        BadStageParams: parameters are missing, unexpected or invalid, or the
            stage order is unusable.
    """
    if not config.stages:
        raise BadStageParams("pipeline", "at least one stage is required")
    if not _is_int(config.seed) or not 0 <= config.seed <= MAX_SEED:
        raise BadStageParams("pipeline", f"seed must be an unsigned 64-bit integer, got {config.seed!r}")
    stages: list[Stage] = []
    for sc in config.stages:
        if sc.type not in _REGISTRY:
            raise UnknownStage(sc.type)
        try:
            stage = _REGISTRY[sc.type](**sc.params)
            stage.check()
        except (TypeError, ValueError) as exc:
            raise BadStageParams(sc.type, str(exc)) from exc
        stages.append(stage)
    for i, stage in enumerate(stages[:-1]):
        if isinstance(stage, SelectKeys):
            raise BadStageParams("SelectKeys", "must be the last stage")
        if isinstance(stage, ChargridRasterize) and not all(s.keeps_geometry for s in stages[i + 1:]):
            raise BadStageParams("ChargridRasterize", "may only be followed by non-geometric stages")
    return Pipeline(tuple(stages), config.seed)


def run_pipeline(pipeline: Pipeline, record: ImageRecord, path: str = "") -> PipelineOutput:
    """Apply every stage in order.

    Returns the task sample when the pipeline ends in ``SelectKeys``, the
    chargrid when it ends in ``ChargridRasterize``, otherwise the record.
    A failing stage's exception propagates with ``stage_index`` and
    ``stage_type`` attributes set.
    """
    state = State(record, path)
    for i, stage in enumerate(pipeline.stages):
        try:
            state = stage(state)
        except DavarLabelError as exc:
            exc.stage_index = i  # type: ignore[attr-defined]
            exc.stage_type = type(stage).__name__  # type: ignore[attr-defined]
            raise
    if state.sample is not None:
        return state.sample
    if isinstance(pipeline.stages[-1], ChargridRasterize):
        return state.chargrid  # type: ignore[return-value]
    return state.record
