"""Error metrics, the persistence baseline, and the benchmarking report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ShapeError, ValidationError


def mae(pred, actual):
    """Mean absolute error over all entries."""
    pred = np.asarray(pred, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if pred.shape != actual.shape:
        raise ShapeError(
            f"shape mismatch: predictions {pred.shape} vs actuals {actual.shape}"
        )
    if pred.size == 0:
        raise ValidationError("cannot compute MAE of empty matrices")
    return float(np.abs(pred - actual).mean())


def persistence_baseline(inputs, m, r, l):
    """Naive no-change forecast: repeat each window's last observed step.

    `inputs` rows are time-major flattened windows of r steps over m
    variables; the forecast tiles the final step's m values l times.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if r != l:
        raise ValidationError(f"persistence baseline requires r == l, got {r}, {l}")
    if inputs.ndim != 2 or inputs.shape[1] != m * r:
        raise ShapeError(
            f"inputs must be Q x {m * r} for m={m}, r={r}, got {inputs.shape}"
        )
    last_step = inputs[:, (r - 1) * m:]
    return np.tile(last_step, l)


@dataclass
class ForecastReport:
    """Split-level MAE and timing plus the per-patch training history.

    MAE fields are on the normalized [0, 1] scale; the per-variable
    breakdown is denormalized.  train_seconds is the exact sum of the
    per-patch fit times.
    """

    train_mae: float
    test_mae: float
    baseline_test_mae: float
    train_seconds: float
    test_seconds: float
    config: dict
    history: list = field(default_factory=list)
    n: int = 0
    q_train: int = 0
    q_test: int = 0
    patch_count: int = 0
    per_variable_test_mae: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        """JSON-ready document; times rounded to millisecond resolution."""
        return {
            "train_mae": self.train_mae,
            "test_mae": self.test_mae,
            "baseline_test_mae": self.baseline_test_mae,
            "train_seconds": round(self.train_seconds, 3),
            "test_seconds": round(self.test_seconds, 3),
            "n": self.n,
            "q_train": self.q_train,
            "q_test": self.q_test,
            "patch_count": self.patch_count,
            "config": self.config,
            "per_variable_test_mae": self.per_variable_test_mae,
            "history": [
                {
                    "patch_index": h.patch_index,
                    "train_mae": h.train_mae,
                    "fit_seconds": round(h.fit_seconds, 6),
                }
                for h in self.history
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    CSV_FIELDS = (
        "r", "l", "stride", "patch_size", "lambda", "prior", "smooth_w",
        "train_mae", "test_mae", "baseline_test_mae",
        "train_seconds", "test_seconds", "patch_count",
    )

    def to_csv_row(self) -> list:
        """Flat row (matching CSV_FIELDS) for sweep aggregation."""
        cfg = self.config
        return [
            cfg.get("r"), cfg.get("l"), cfg.get("stride"), cfg.get("patch_size"),
            cfg.get("lambda"), cfg.get("prior"), cfg.get("smooth_w"),
            self.train_mae, self.test_mae, self.baseline_test_mae,
            round(self.train_seconds, 3), round(self.test_seconds, 3),
            self.patch_count,
        ]


def benchmark(series, cfg):
    """Run the full online pipeline and return its ForecastReport."""
    from .network import run_online

    _, report = run_online(series, cfg)
    return report
