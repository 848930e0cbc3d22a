"""The chained online pipeline: prior initialization, per-patch training,
tanh knowledge transfer, prediction, and the end-to-end streaming run.

At any moment the live model is the last trained block.  Training on a
patch consumes the pending prior weights, fits the output gate in closed
form, and stores tanh of the learned weights as the priors for the next
patch.  Each patch is visited exactly once; a fit never modifies the
priors it consumed.

The model is a single-writer state machine: `train_on_patch` requires
exclusive access, `predict` is read-only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import data as data_mod
from . import linalg, stcn
from .config import PRIOR_WARMUP, PRIOR_ZEROS, PipelineConfig
from .evaluate import ForecastReport, mae, persistence_baseline
from .exceptions import NotFittedError, ShapeError, ValidationError
from .stcn import ActivationConfig, StcnWeights


@dataclass(frozen=True)
class PatchMetrics:
    """Per-patch record: in-sample reconstruction MAE and the wall-clock
    of the block's training step (gate pass, fit, knowledge transfer)."""

    patch_index: int
    train_mae: float
    fit_seconds: float


def aggregate(w_out, b_out):
    """Knowledge transfer: elementwise tanh of the learned weights,
    producing the next block's priors, bounded in (-1, 1)."""
    w_out = linalg.as_matrix(w_out, "learned weights")
    b_out = linalg.as_row_vector(b_out, "learned bias")
    return np.tanh(w_out), np.tanh(b_out)


def init_priors(warmup_patch, mode, cfg):
    """Priors for the first block.

    "zeros" ignores the patch and returns zero matrices.  "warmup" fits a
    single block without an intermediate state (the hidden state is the
    patch input itself) and returns its learned weights; callers should
    build the patch from a smoothed version of the available training
    series (see `run_online`).
    """
    if mode == PRIOR_ZEROS:
        n = warmup_patch.inputs.shape[1]
        return np.zeros((n, n)), np.zeros((1, n))
    if mode != PRIOR_WARMUP:
        raise ValidationError(f"unknown prior mode {mode!r}")
    if warmup_patch.size < 1:
        raise ValidationError("warm-up patch is empty")
    if warmup_patch.inputs.shape[1] != warmup_patch.targets.shape[1]:
        raise ShapeError(
            "warm-up patch must have equal input/target widths, got "
            f"{warmup_patch.inputs.shape[1]} and {warmup_patch.targets.shape[1]}"
        )
    return stcn.fit_output_gate(warmup_patch.inputs, warmup_patch.targets, cfg)


def _frozen_copy(arr):
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


class LstcnModel:
    """Live model state: the last trained block plus pending priors.

    `weights` is the last block (its input gate holds the priors that
    were frozen during its fit); `next_priors` is the tanh-aggregated
    knowledge the next patch will train against.
    """

    def __init__(self, n, cfg: ActivationConfig, prior_weights=None, prior_bias=None):
        n = int(n)
        if n < 1:
            raise ValidationError(f"feature width must be >= 1, got {n}")
        self.n = n
        self.cfg = cfg
        if prior_weights is None:
            prior_weights = np.zeros((n, n))
        if prior_bias is None:
            prior_bias = np.zeros((1, n))
        prior_weights = linalg.as_matrix(prior_weights, "prior weights")
        prior_bias = linalg.as_row_vector(prior_bias, "prior bias")
        if prior_weights.shape != (n, n) or prior_bias.shape != (1, n):
            raise ShapeError(
                f"priors must be {n}x{n} and 1x{n}, got "
                f"{prior_weights.shape} and {prior_bias.shape}"
            )
        self._next_w = _frozen_copy(prior_weights)
        self._next_b = _frozen_copy(prior_bias)
        self.weights: StcnWeights | None = None
        self.patches_seen = 0
        self.history: list[PatchMetrics] = []

    @property
    def is_fitted(self) -> bool:
        return self.weights is not None

    @property
    def next_priors(self):
        """Priors the next `train_on_patch` call will consume."""
        return self._next_w, self._next_b

    def _check_patch(self, patch):
        if patch.size < 1:
            raise ValidationError("patch is empty")
        if patch.inputs.shape[1] != self.n or patch.targets.shape[1] != self.n:
            raise ShapeError(
                f"patch width mismatch: model expects {self.n}, patch has "
                f"inputs {patch.inputs.shape[1]} and targets "
                f"{patch.targets.shape[1]}"
            )

    def train_on_patch(self, patch) -> "LstcnModel":
        """Train a new block on one patch (visited exactly once).

        Consumes the pending priors (left bitwise untouched by the fit),
        fits the output gate, records metrics, and stores tanh of the
        learned weights as the next block's priors.
        """
        self._check_patch(patch)
        w_in, b_in = self._next_w, self._next_b

        start = time.perf_counter()
        hidden = stcn.input_gate(patch.inputs, w_in, b_in)
        w_out, b_out = stcn.fit_output_gate(hidden, patch.targets, self.cfg)
        next_w, next_b = aggregate(w_out, b_out)
        elapsed = time.perf_counter() - start

        reconstruction = stcn.output_gate(hidden, w_out, b_out)
        self.weights = StcnWeights(w_in, b_in, w_out, b_out)
        self._next_w = _frozen_copy(next_w)
        self._next_b = _frozen_copy(next_b)
        self.history.append(
            PatchMetrics(
                patch_index=patch.index,
                train_mae=mae(reconstruction, patch.targets),
                fit_seconds=elapsed,
            )
        )
        self.patches_seen += 1
        return self

    def predict(self, inputs):
        """Forecast with the live block; outputs lie in (0, 1)."""
        if not self.is_fitted:
            raise NotFittedError("model has not been trained on any patch yet")
        inputs = linalg.as_matrix(inputs, "inputs")
        if inputs.shape[1] != self.n:
            raise ShapeError(
                f"inputs have width {inputs.shape[1]}, model expects {self.n}"
            )
        block = self.weights
        hidden = stcn.input_gate(inputs, block.w_in, block.b_in)
        return stcn.output_gate(hidden, block.w_out, block.b_out)


def prepare_series(series, cfg: PipelineConfig):
    """Variable selection + split + normalization for a pipeline run.

    Returns (normalized_series, params, split_end).  Normalization is
    fitted on the training prefix only; the test part is clamped.
    """
    if cfg.variables:
        series = series.select(list(cfg.variables))
    if not np.isfinite(series.values).all():
        raise ValidationError("series has missing values; run clean() first")
    split_end = int(series.t * cfg.train_fraction)
    min_len = cfg.lags + cfg.horizon
    if split_end < min_len:
        raise ValidationError(
            f"training split has {split_end} steps; need at least {min_len}"
        )
    params = data_mod.normalize_fit(series, split_end)
    return data_mod.normalize_apply(series, params), params, split_end


def _slice_series(series, start, stop):
    return data_mod.TimeSeries(
        list(series.names),
        series.timestamps[start:stop].copy(),
        series.values[:, start:stop].copy(),
        series.time_format,
    )


def run_online(series, cfg: PipelineConfig):
    """Stream the training patches once and evaluate on the hold-out.

    The series must be clean (fixed grid, no missing values).  Returns
    (model, report); all reported MAE values are on the normalized scale,
    with a denormalized per-variable breakdown in the report.
    """
    normalized, params, split_end = prepare_series(series, cfg)
    train_series = _slice_series(normalized, 0, split_end)
    test_series = _slice_series(normalized, split_end, normalized.t)

    train_windows = data_mod.make_windows(
        train_series, cfg.lags, cfg.horizon, cfg.stride
    )
    if train_windows.q == 0:
        raise ValidationError("training split too short to produce a window")
    test_windows = data_mod.make_windows(
        test_series, cfg.lags, cfg.horizon, cfg.stride
    )
    if test_windows.q == 0:
        raise ValidationError("test split too short to produce a window")

    acfg = ActivationConfig(cfg.ridge_lambda, cfg.logit_epsilon)
    n = normalized.m * cfg.lags

    if cfg.prior_mode == PRIOR_WARMUP:
        smoothed = data_mod.moving_average(train_series, cfg.smooth_window)
        warm_windows = data_mod.make_windows(
            smoothed, cfg.lags, cfg.horizon, cfg.stride
        )
        warm_patch = data_mod.TimePatch(warm_windows.inputs, warm_windows.targets, 0)
        w0, b0 = init_priors(warm_patch, PRIOR_WARMUP, acfg)
    else:
        w0, b0 = np.zeros((n, n)), np.zeros((1, n))

    model = LstcnModel(n, acfg, w0, b0)
    patches = data_mod.partition(train_windows, cfg.patch_size)
    sizes = []
    for patch in patches:
        model.train_on_patch(patch)
        sizes.append(patch.size)

    train_mae = float(
        np.average([h.train_mae for h in model.history], weights=sizes)
    )
    train_seconds = float(sum(h.fit_seconds for h in model.history))

    start = time.perf_counter()
    predictions = model.predict(test_windows.inputs)
    test_seconds = time.perf_counter() - start
    test_mae = mae(predictions, test_windows.targets)

    baseline = persistence_baseline(
        test_windows.inputs, normalized.m, cfg.lags, cfg.horizon
    )
    baseline_mae = mae(baseline, test_windows.targets)

    per_variable = _per_variable_denormalized_mae(
        predictions, test_windows.targets, normalized.m, params
    )

    report = ForecastReport(
        train_mae=train_mae,
        test_mae=test_mae,
        baseline_test_mae=baseline_mae,
        train_seconds=train_seconds,
        test_seconds=test_seconds,
        config=cfg.as_dict(),
        history=list(model.history),
        n=n,
        q_train=train_windows.q,
        q_test=test_windows.q,
        patch_count=len(patches),
        per_variable_test_mae=per_variable,
    )
    return model, report


def _per_variable_denormalized_mae(pred, actual, m, params):
    """MAE per variable on the original scale (columns v, v+M, v+2M, ...
    of the time-major flattening belong to variable v)."""
    scale = params.maxs - params.mins
    out = {}
    for v, name in enumerate(params.names):
        diff = np.abs(pred[:, v::m] - actual[:, v::m]) * scale[v]
        out[name] = float(diff.mean())
    return out
