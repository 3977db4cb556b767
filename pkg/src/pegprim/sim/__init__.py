from .env import (
    DEFAULT_RESET,
    EpisodeSetup,
    Observation,
    PegInHoleEnv,
    PegPose,
    PrimitiveOutcome,
    ResetDistribution,
    RewardSpec,
    Wrench,
    check_success,
    contact_wrench,
    execute_primitive,
    observe,
    reward,
    sample_setup,
    wrap_angle,
)
from .geometry import (
    HOLE_DEPTH,
    K_EFF,
    PEG_HEIGHT,
    SHAPES,
    TASK_PRESETS,
    TaskGeometry,
    make_task,
    point_penetration,
    task_from_name,
)
from .kernels import BACKEND, BACKENDS, get_backend

__all__ = [
    "DEFAULT_RESET",
    "EpisodeSetup",
    "Observation",
    "PegInHoleEnv",
    "PegPose",
    "PrimitiveOutcome",
    "ResetDistribution",
    "RewardSpec",
    "Wrench",
    "check_success",
    "contact_wrench",
    "execute_primitive",
    "observe",
    "reward",
    "sample_setup",
    "wrap_angle",
    "HOLE_DEPTH",
    "K_EFF",
    "PEG_HEIGHT",
    "SHAPES",
    "TASK_PRESETS",
    "TaskGeometry",
    "make_task",
    "point_penetration",
    "task_from_name",
    "BACKEND",
    "BACKENDS",
    "get_backend",
]
