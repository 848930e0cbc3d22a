"""Online multivariate time-series forecasting with chained cognitive
blocks trained per data chunk by a closed-form ridge rule."""

from ._kernels import BACKEND as KERNEL_BACKEND
from ._kernels import available_backends
from .config import PipelineConfig, parse_config_file
from .data import (
    NormalizationParams,
    TimePatch,
    TimeSeries,
    WindowSet,
    clean,
    infer_interval,
    load_csv,
    load_window_set,
    make_windows,
    moving_average,
    normalize_apply,
    normalize_fit,
    normalize_invert,
    partition,
    save_window_set,
    unflatten_window,
)
from .evaluate import ForecastReport, benchmark, mae, persistence_baseline
from .exceptions import (
    DataFormatError,
    LstcnError,
    NotFittedError,
    ShapeError,
    SingularMatrixError,
    ValidationError,
)
from .linalg import broadcast_add_row, matmul, ridge_solve
from .network import (
    LstcnModel,
    PatchMetrics,
    aggregate,
    init_priors,
    run_online,
)
from .snapshot import load_model, save_model
from .stcn import (
    ActivationConfig,
    StcnWeights,
    fit_output_gate,
    input_gate,
    logit,
    output_gate,
    sigmoid,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationConfig",
    "DataFormatError",
    "ForecastReport",
    "KERNEL_BACKEND",
    "LstcnError",
    "LstcnModel",
    "NormalizationParams",
    "NotFittedError",
    "PatchMetrics",
    "PipelineConfig",
    "ShapeError",
    "SingularMatrixError",
    "StcnWeights",
    "TimePatch",
    "TimeSeries",
    "ValidationError",
    "WindowSet",
    "aggregate",
    "available_backends",
    "benchmark",
    "broadcast_add_row",
    "clean",
    "fit_output_gate",
    "infer_interval",
    "init_priors",
    "input_gate",
    "load_csv",
    "load_model",
    "load_window_set",
    "logit",
    "mae",
    "make_windows",
    "matmul",
    "moving_average",
    "normalize_apply",
    "normalize_fit",
    "normalize_invert",
    "output_gate",
    "parse_config_file",
    "partition",
    "persistence_baseline",
    "ridge_solve",
    "run_online",
    "save_model",
    "save_window_set",
    "sigmoid",
    "unflatten_window",
    "__version__",
]
