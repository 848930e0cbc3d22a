"""Ingestion, cleaning, normalization, smoothing, windowing and patching.

A series is stored with variables as rows and timestamps as columns.
Cleaning aligns samples to a fixed grid, drops duplicate timestamps and
imputes gaps; normalization is min-max fitted on a designated prefix;
windowing flattens (past, future) column blocks into example rows that
are then partitioned into fixed-size time patches for online training.
All transformations are pure functions of their inputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .container import read_container, write_container
from .exceptions import DataFormatError, ShapeError, ValidationError

TIMESTAMP_COLUMN = "timestamp"


@dataclass
class TimeSeries:
    """Multivariate series: values has one row per variable.

    Raw (just-loaded) series may contain NaN values, duplicate or gapped
    timestamps; `clean` establishes the invariants (strictly increasing
    fixed-interval timestamps, finite values).
    """

    names: list[str]
    timestamps: np.ndarray  # (T,) epoch seconds
    values: np.ndarray      # (M, T)
    time_format: str = "epoch"  # how timestamps appeared in the source

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ShapeError(f"values must be 2-D, got ndim={self.values.ndim}")
        m, t = self.values.shape
        if m < 1 or t < 1:
            raise ValidationError(f"series must be at least 1x1, got {m}x{t}")
        if len(self.names) != m:
            raise ValidationError(
                f"{len(self.names)} variable names for {m} value rows"
            )
        if self.timestamps.shape != (t,):
            raise ShapeError(
                f"expected {t} timestamps, got {self.timestamps.shape}"
            )

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]

    def select(self, names: list[str]) -> TimeSeries:
        """Sub-series with the given variables, in the given order."""
        missing = [n for n in names if n not in self.names]
        if missing:
            raise ValidationError(f"unknown variable(s): {', '.join(missing)}")
        rows = [self.names.index(n) for n in names]
        return TimeSeries(
            list(names), self.timestamps.copy(), self.values[rows].copy(),
            self.time_format,
        )


@dataclass
class NormalizationParams:
    """Per-variable min-max range fitted on a training prefix."""

    names: list[str]
    mins: np.ndarray  # (M,)
    maxs: np.ndarray  # (M,)

    def __post_init__(self):
        self.mins = np.asarray(self.mins, dtype=np.float64)
        self.maxs = np.asarray(self.maxs, dtype=np.float64)
        if np.any(self.maxs < self.mins):
            raise ValidationError("normalization max below min")


@dataclass
class WindowSet:
    """Flattened sliding-window examples.

    Row q of inputs holds `lags` past steps and row q of targets the next
    `horizon` steps, both flattened time-major (each step's variables are
    contiguous).
    """

    inputs: np.ndarray   # (Q, M*lags)
    targets: np.ndarray  # (Q, M*horizon)
    lags: int
    horizon: int
    stride: int
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ShapeError("inputs and targets must have equal row counts")

    @property
    def q(self) -> int:
        return self.inputs.shape[0]


@dataclass
class TimePatch:
    """One chunk of consecutive window rows, the unit of online training.

    The forecasting model additionally requires equal input/target widths
    (lags == horizon).
    """

    inputs: np.ndarray
    targets: np.ndarray
    index: int

    def __post_init__(self):
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ShapeError("patch inputs and targets must have equal row counts")

    @property
    def size(self) -> int:
        return self.inputs.shape[0]


def _parse_timestamp(text, fmt):
    if fmt == "epoch":
        return float(text)
    iso = text.strip()
    if iso.endswith("Z"):
        iso = iso[:-1] + "+00:00"
    dt = datetime.fromisoformat(iso)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _detect_time_format(text):
    try:
        float(text)
        return "epoch"
    except ValueError:
        pass
    try:
        _parse_timestamp(text, "iso")
        return "iso"
    except ValueError:
        return None


def format_timestamp(epoch_seconds, fmt):
    """Render an epoch-seconds value the way the source file wrote times."""
    if fmt == "iso":
        dt = datetime.fromtimestamp(round(epoch_seconds), tz=timezone.utc)
        return dt.strftime("%Y-%m-%dT%H:%M:%S")
    value = float(epoch_seconds)
    return str(int(value)) if value.is_integer() else repr(value)


def load_csv(path):
    """Parse a CSV with a `timestamp` column and M numeric variable columns.

    Rows are kept in file order; duplicates and grid gaps are preserved
    for `clean` to resolve.  Empty fields become NaN (missing value).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        lowered = [h.lower() for h in header]
        if TIMESTAMP_COLUMN not in lowered:
            raise DataFormatError(
                f"{path}: header must name a '{TIMESTAMP_COLUMN}' column, "
                f"got {header}"
            )
        ts_col = lowered.index(TIMESTAMP_COLUMN)
        names = [h for i, h in enumerate(header) if i != ts_col]
        if not names:
            raise DataFormatError(f"{path}: no variable columns in header")

        stamps = []
        rows = []
        fmt = None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: line {lineno}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            raw_ts = row[ts_col].strip()
            if fmt is None:
                fmt = _detect_time_format(raw_ts)
                if fmt is None:
                    raise DataFormatError(
                        f"{path}: line {lineno}: unparsable timestamp {raw_ts!r}"
                    )
            try:
                stamps.append(_parse_timestamp(raw_ts, fmt))
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: unparsable timestamp {raw_ts!r}"
                ) from None
            parsed = []
            for i, cell in enumerate(row):
                if i == ts_col:
                    continue
                cell = cell.strip()
                if not cell:
                    parsed.append(math.nan)
                    continue
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: line {lineno}: unparsable value {cell!r} "
                        f"in column {header[i]!r}"
                    ) from None
            rows.append(parsed)

    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    values = np.asarray(rows, dtype=np.float64).T
    return TimeSeries(names, np.asarray(stamps), values, time_format=fmt)


def _impute_column(x, name):
    """Fill NaN runs: back-fill leading, forward-fill length-1 and trailing
    runs, linear interpolation for interior runs of length >= 2."""
    isnan = np.isnan(x)
    if not isnan.any():
        return x
    if isnan.all():
        raise ValidationError(f"variable {name!r} has no observed values")
    out = x.copy()
    n = len(x)
    i = 0
    while i < n:
        if not isnan[i]:
            i += 1
            continue
        j = i
        while j < n and isnan[j]:
            j += 1
        run = j - i
        if i == 0:
            out[i:j] = out[j]  # leading gap: back-fill
        elif j == n or run == 1:
            out[i:j] = out[i - 1]  # trailing gap or single point: forward-fill
        else:
            left, right = out[i - 1], out[j]
            steps = np.arange(1, run + 1, dtype=np.float64) / (run + 1)
            out[i:j] = left + steps * (right - left)
        i = j
    return out


def clean(raw, expected_interval):
    """Align to the fixed sampling grid, drop duplicates, impute gaps.

    Duplicate timestamps keep the first occurrence; missing grid slots
    are inserted and imputed per variable.  Idempotent on clean series.
    """
    interval = float(expected_interval)
    if not interval > 0:
        raise ValidationError(f"expected_interval must be > 0, got {interval}")
    t0 = float(raw.timestamps.min())
    idx = np.rint((raw.timestamps - t0) / interval).astype(np.int64)
    t_grid = int(idx.max()) + 1
    grid = np.full((raw.m, t_grid), np.nan)
    filled = np.zeros(t_grid, dtype=bool)
    for col, slot in enumerate(idx):
        if filled[slot]:
            continue  # duplicate timestamp: first occurrence wins
        grid[:, slot] = raw.values[:, col]
        filled[slot] = True
    for row, name in enumerate(raw.names):
        grid[row] = _impute_column(grid[row], name)
    timestamps = t0 + np.arange(t_grid, dtype=np.float64) * interval
    return TimeSeries(list(raw.names), timestamps, grid, raw.time_format)


def infer_interval(series):
    """Median positive gap between consecutive timestamps."""
    if series.t < 2:
        raise ValidationError("need at least two timestamps to infer an interval")
    diffs = np.diff(np.sort(series.timestamps))
    diffs = diffs[diffs > 0]
    if diffs.size == 0:
        raise ValidationError("all timestamps identical; cannot infer interval")
    return float(np.median(diffs))


def normalize_fit(series, split_end):
    """Min-max ranges per variable over columns [0, split_end)."""
    if not 1 <= split_end <= series.t:
        raise ValidationError(
            f"split_end must be in [1, {series.t}], got {split_end}"
        )
    segment = series.values[:, :split_end]
    if not np.isfinite(segment).all():
        raise ValidationError("series has missing values; run clean() first")
    return NormalizationParams(
        list(series.names), segment.min(axis=1), segment.max(axis=1)
    )


def normalize_apply(series, params):
    """Affine map of each variable onto [0, 1] of its fit range, clamped.

    Variables with a degenerate (min == max) fit range map to constant 0.
    """
    if list(series.names) != list(params.names):
        raise ValidationError("normalization params fitted on different variables")
    scale = params.maxs - params.mins
    safe = np.where(scale > 0.0, scale, 1.0)
    shifted = (series.values - params.mins[:, None]) / safe[:, None]
    shifted[scale == 0.0, :] = 0.0
    np.clip(shifted, 0.0, 1.0, out=shifted)
    return TimeSeries(
        list(series.names), series.timestamps.copy(), shifted, series.time_format
    )


def normalize_invert(values, params):
    """Exact inverse of `normalize_apply` on unclamped values.

    `values` has one row per variable (any number of columns).
    """
    values = np.asarray(values, dtype=np.float64)
    scale = (params.maxs - params.mins).reshape(-1, *([1] * (values.ndim - 1)))
    mins = params.mins.reshape(scale.shape)
    return mins + values * scale


def moving_average(series, w):
    """Trailing mean of width w; early positions average what exists."""
    w = int(w)
    if w < 1:
        raise ValidationError(f"window must be >= 1, got {w}")
    if w == 1:
        return TimeSeries(
            list(series.names), series.timestamps.copy(), series.values.copy(),
            series.time_format,
        )
    cs = np.cumsum(series.values, axis=1)
    out = np.empty_like(series.values)
    t = series.t
    counts = np.minimum(np.arange(1, t + 1, dtype=np.float64), float(w))
    out[:, :w] = cs[:, :w]
    if t > w:
        out[:, w:] = cs[:, w:] - cs[:, :-w]
    out /= counts
    return TimeSeries(
        list(series.names), series.timestamps.copy(), out, series.time_format
    )


def flatten_block(block):
    """Flatten an (M, steps) column block time-major: each step's M
    variables stay contiguous."""
    return block.T.reshape(-1)


def unflatten_window(row, m):
    """Inverse of `flatten_block`: recover the (M, steps) block."""
    row = np.asarray(row)
    if row.size % m:
        raise ShapeError(f"window of length {row.size} does not split into {m} variables")
    return row.reshape(-1, m).T


def make_windows(series, r, l, stride=1):
    """Slide an (r past, l future) window over the series and flatten.

    Produces Q = floor((T - r - l) / stride) + 1 example rows (zero when
    the series is shorter than r + l, which is not an error).
    """
    r, l, stride = int(r), int(l), int(stride)
    for name, v in (("r", r), ("l", l), ("stride", stride)):
        if v < 1:
            raise ValidationError(f"{name} must be >= 1, got {v}")
    m, t = series.m, series.t
    if t < r + l:
        return WindowSet(
            np.empty((0, m * r)), np.empty((0, m * l)), r, l, stride,
            list(series.names),
        )
    span = sliding_window_view(series.values, r + l, axis=1)  # (M, T-r-l+1, r+l)
    anchors = np.arange(0, t - r - l + 1, stride)
    block = span[:, anchors, :]
    inputs = block[:, :, :r].transpose(1, 2, 0).reshape(len(anchors), r * m)
    targets = block[:, :, r:].transpose(1, 2, 0).reshape(len(anchors), l * m)
    return WindowSet(
        np.ascontiguousarray(inputs), np.ascontiguousarray(targets),
        r, l, stride, list(series.names),
    )


def partition(windows, c):
    """Split window rows into consecutive patches of c rows, last one may
    be short; K = ceil(Q / c)."""
    c = int(c)
    if c < 1:
        raise ValidationError(f"patch size must be >= 1, got {c}")
    patches = []
    for k, start in enumerate(range(0, windows.q, c)):
        stop = min(start + c, windows.q)
        patches.append(
            TimePatch(windows.inputs[start:stop], windows.targets[start:stop], k)
        )
    return patches


def save_window_set(path, windows, extra_meta=None):
    """Write the flattened Q x (M(r+l)) matrix with a metadata header."""
    if not windows.names:
        raise ValidationError("window set has no variable names to record")
    meta = {
        "kind": "window-set",
        "m": len(windows.names),
        "r": windows.lags,
        "l": windows.horizon,
        "stride": windows.stride,
        "names": list(windows.names),
    }
    if extra_meta:
        meta["extra"] = extra_meta
    flat = np.hstack([windows.inputs, windows.targets])
    write_container(path, meta, {"windows": flat})


def load_window_set(path):
    """Read back a window-set container -> (WindowSet, extra_meta)."""
    meta, arrays = read_container(path)
    if meta.get("kind") != "window-set":
        raise DataFormatError(f"{path}: not a window-set container")
    m, r, l = meta["m"], meta["r"], meta["l"]
    flat = arrays["windows"]
    if flat.shape[1] != m * (r + l):
        raise DataFormatError(
            f"{path}: expected {m * (r + l)} columns, found {flat.shape[1]}"
        )
    ws = WindowSet(
        np.ascontiguousarray(flat[:, : m * r]),
        np.ascontiguousarray(flat[:, m * r:]),
        r, l, meta["stride"], list(meta["names"]),
    )
    return ws, meta.get("extra")
