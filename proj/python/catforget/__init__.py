"""Two-task teacher-student forgetting: closed forms, RK4 oracle and online SGD."""

from ._core import (
    ContinualConfig,
    Error,
    OrderParamState,
    OvershootClass,
    OvershootVariant,
    TaskOneEndpoint,
    TrajectoryRecord,
    ValidatedConfig,
    forgetting_heatmap,
    integrate,
    learning_curve,
    preset,
    preset_names,
    run_continual,
    theory,
    validate,
)

__all__ = [
    "ContinualConfig",
    "Error",
    "OrderParamState",
    "OvershootClass",
    "OvershootVariant",
    "TaskOneEndpoint",
    "TrajectoryRecord",
    "ValidatedConfig",
    "forgetting_heatmap",
    "integrate",
    "learning_curve",
    "preset",
    "preset_names",
    "run_continual",
    "theory",
    "validate",
]
