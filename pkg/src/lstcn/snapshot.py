"""Model snapshot: versioned single-file container, bit-exact matrices.

Stores the live block's four matrices, the fit configuration, the patch
counter and history.  The pending next-block priors are tanh of the
learned weights and are recomputed exactly on load, so a reloaded model
predicts and continues training bit-identically.
"""

import numpy as np

from .container import read_container, write_container
from .exceptions import DataFormatError, NotFittedError
from .network import LstcnModel, PatchMetrics
from .stcn import ActivationConfig, StcnWeights

SNAPSHOT_VERSION = 1


def save_model(path, model, extra_meta=None, extra_arrays=None):
    """Write a fitted model to `path`; optional extras ride along."""
    if not model.is_fitted:
        raise NotFittedError("cannot snapshot a model that has not been trained")
    block = model.weights
    meta = {
        "kind": "model-snapshot",
        "snapshot_version": SNAPSHOT_VERSION,
        "n": model.n,
        "ridge_lambda": model.cfg.ridge_lambda,
        "logit_epsilon": model.cfg.logit_epsilon,
        "patches_seen": model.patches_seen,
    }
    if extra_meta:
        meta["extra"] = extra_meta
    arrays = {
        "w_in": block.w_in,
        "b_in": block.b_in,
        "w_out": block.w_out,
        "b_out": block.b_out,
        "history_patch_index": np.array(
            [h.patch_index for h in model.history], dtype=np.float64
        ),
        "history_train_mae": np.array(
            [h.train_mae for h in model.history], dtype=np.float64
        ),
        "history_fit_seconds": np.array(
            [h.fit_seconds for h in model.history], dtype=np.float64
        ),
    }
    if extra_arrays:
        arrays.update(extra_arrays)
    write_container(path, meta, arrays)


def load_model(path):
    """Read a snapshot -> (model, extra_meta, extra_arrays)."""
    meta, arrays = read_container(path)
    if meta.get("kind") != "model-snapshot":
        raise DataFormatError(f"{path}: not a model snapshot")
    if meta.get("snapshot_version") != SNAPSHOT_VERSION:
        raise DataFormatError(
            f"{path}: unsupported snapshot version {meta.get('snapshot_version')!r}"
        )
    cfg = ActivationConfig(meta["ridge_lambda"], meta["logit_epsilon"])
    block = StcnWeights(
        arrays["w_in"], arrays["b_in"], arrays["w_out"], arrays["b_out"]
    )
    model = LstcnModel(meta["n"], cfg, *_next_priors(block))
    model.weights = block
    model.patches_seen = int(meta["patches_seen"])
    model.history = [
        PatchMetrics(int(i), float(m_), float(s))
        for i, m_, s in zip(
            arrays["history_patch_index"],
            arrays["history_train_mae"],
            arrays["history_fit_seconds"],
        )
    ]
    known = {
        "w_in", "b_in", "w_out", "b_out",
        "history_patch_index", "history_train_mae", "history_fit_seconds",
    }
    extra_arrays = {k: v for k, v in arrays.items() if k not in known}
    return model, meta.get("extra"), extra_arrays


def _next_priors(block):
    return np.tanh(block.w_out), np.tanh(block.b_out)
