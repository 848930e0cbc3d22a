"""Shared fixtures: synthetic series generators and CSV writers."""

import csv
from datetime import datetime, timezone

import numpy as np

from lstcn import TimeSeries


def make_synthetic_series(t=10000, m=4, seed=2024, rho=0.98, drift=0.45,
                          noise=0.02):
    """Multivariate test signal: two oscillators shared by all variables
    (periods 29 and 47 steps, per-variable phase), a slowly decorrelating
    AR(1) level drift, and white noise.

    The drift makes long-horizon forecasts genuinely harder; the shared
    oscillators reward a learned multivariate map over naive persistence.
    """
    rng = np.random.default_rng(seed)
    steps = np.arange(t, dtype=float)
    osc1, osc1c = np.sin(2 * np.pi * steps / 29.0), np.cos(2 * np.pi * steps / 29.0)
    osc2, osc2c = np.sin(2 * np.pi * steps / 47.0), np.cos(2 * np.pi * steps / 47.0)
    vals = np.empty((m, t))
    for v in range(m):
        a, b = np.cos(1.3 * v), np.sin(1.3 * v)
        c, d = np.cos(0.7 * v + 0.4), np.sin(0.7 * v + 0.4)
        ar = np.empty(t)
        ar[0] = 0.0
        eps = rng.standard_normal(t)
        for i in range(1, t):
            ar[i] = rho * ar[i - 1] + eps[i]
        ar *= drift / ar.std()
        vals[v] = (a * osc1 + b * osc1c + 0.5 * (c * osc2 + d * osc2c)
                   + ar + rng.standard_normal(t) * noise)
    names = [f"v{i}" for i in range(m)]
    return TimeSeries(names, steps * 600.0, vals)


def make_constant_series(value=3.7, t=400, m=2, interval=600.0):
    names = [chr(ord("a") + i) for i in range(m)]
    return TimeSeries(
        names, np.arange(t, dtype=float) * interval, np.full((m, t), float(value))
    )


def write_series_csv(path, series, fmt=None):
    """Write a TimeSeries as the CLI's input CSV format."""
    fmt = fmt or series.time_format
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp"] + list(series.names))
        for i in range(series.t):
            ts = series.timestamps[i]
            if fmt == "iso":
                stamp = datetime.fromtimestamp(
                    round(ts), tz=timezone.utc
                ).strftime("%Y-%m-%dT%H:%M:%S")
            else:
                stamp = str(int(ts)) if float(ts).is_integer() else repr(float(ts))
            writer.writerow([stamp] + [repr(float(v)) for v in series.values[:, i]])
    return path
