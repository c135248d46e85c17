from .chargrid import CharGrid, chargrid_rasterize
from .geometric import apply_hflip, apply_resize, apply_rotate90, apply_vflip
from .pipeline import (
    Pipeline,
    PipelineConfig,
    Stage,
    StageConfig,
    build_pipeline,
    register_stage,
    registered_stages,
    run_pipeline,
)
from ..tasks import project as select_keys

__all__ = [
    "CharGrid",
    "Pipeline",
    "PipelineConfig",
    "Stage",
    "StageConfig",
    "apply_hflip",
    "apply_resize",
    "apply_rotate90",
    "apply_vflip",
    "build_pipeline",
    "chargrid_rasterize",
    "register_stage",
    "registered_stages",
    "run_pipeline",
    "select_keys",
]
