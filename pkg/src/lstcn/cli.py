"""Command-line entry point: prepare / train / forecast / sweep.

Runs are fully deterministic given identical inputs and configuration
(the learning rule is closed-form; there is no randomness and no seed).
Exit codes: 0 success, 2 validation/configuration error, 3 I/O or file
format error, 4 numerical failure.
"""

import argparse
import csv
import sys

import numpy as np

from . import data as data_mod
from .config import PipelineConfig, parse_config_file
from .evaluate import mae
from .exceptions import (
    DataFormatError,
    LstcnError,
    NotFittedError,
    ShapeError,
    SingularMatrixError,
    ValidationError,
)
from .network import run_online
from .snapshot import load_model, save_model

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def _add_config_flags(parser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--r", type=int, help="past steps per window")
    parser.add_argument("--l", type=int, help="forecast horizon (must equal --r)")
    parser.add_argument("--stride", type=int, help="window stride (default 1)")
    parser.add_argument("--patch-size", type=int, help="examples per patch (default 1024)")
    parser.add_argument("--lambda", dest="ridge_lambda", type=float,
                        help="ridge penalty (default 0.01)")
    parser.add_argument("--epsilon", type=float, help="logit clipping (default 1e-6)")
    parser.add_argument("--prior", choices=["zeros", "warmup"],
                        help="first-block prior mode (default warmup)")
    parser.add_argument("--smooth-w", type=int,
                        help="warm-up moving-average window (default 10)")
    parser.add_argument("--train-frac", type=float,
                        help="training fraction of the series (default 0.8)")
    parser.add_argument("--vars", help="comma-separated variable names to use")
    parser.add_argument("--interval", type=float,
                        help="sampling interval in seconds (inferred when omitted)")


def _config_kwargs(args):
    """Defaults < config file < command-line flags."""
    kwargs = {}
    if args.config:
        kwargs.update(parse_config_file(args.config))
    flag_map = {
        "r": "lags",
        "l": "horizon",
        "stride": "stride",
        "patch_size": "patch_size",
        "ridge_lambda": "ridge_lambda",
        "epsilon": "logit_epsilon",
        "prior": "prior_mode",
        "smooth_w": "smooth_window",
        "train_frac": "train_fraction",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            kwargs[key] = value
    if getattr(args, "vars", None):
        kwargs["variables"] = tuple(
            v.strip() for v in args.vars.split(",") if v.strip()
        )
    return kwargs


def _build_config(args):
    kwargs = _config_kwargs(args)
    if "lags" not in kwargs or "horizon" not in kwargs:
        raise ValidationError("--r and --l are required (flags or config file)")
    return PipelineConfig(**kwargs)


def _load_clean_series(path, cfg, interval):
    series = data_mod.load_csv(path)
    if cfg.variables:
        series = series.select(list(cfg.variables))
    if interval is None:
        interval = data_mod.infer_interval(series)
    return data_mod.clean(series, interval), float(interval)


def cmd_prepare(args):
    cfg = _build_config(args)
    series, interval = _load_clean_series(args.input, cfg, args.interval)
    split_end = int(series.t * cfg.train_fraction)
    params = data_mod.normalize_fit(series, split_end)
    normalized = data_mod.normalize_apply(series, params)
    windows = data_mod.make_windows(normalized, cfg.lags, cfg.horizon, cfg.stride)
    k = -(-windows.q // cfg.patch_size) if windows.q else 0
    n = normalized.m * cfg.lags
    data_mod.save_window_set(
        args.out,
        windows,
        extra_meta={
            "interval": interval,
            "time_format": series.time_format,
            "split_end": split_end,
            "train_fraction": cfg.train_fraction,
            "norm_mins": params.mins.tolist(),
            "norm_maxs": params.maxs.tolist(),
        },
    )
    print(f"Q={windows.q} K={k} N={n}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_train(args):
    cfg = _build_config(args)
    series, interval = _load_clean_series(args.input, cfg, args.interval)
    model, report = run_online(series, cfg)
    split_end = int(series.t * cfg.train_fraction)
    params = data_mod.normalize_fit(series, split_end)
    save_model(
        args.out,
        model,
        extra_meta={
            "names": list(params.names),
            "interval": interval,
            "time_format": series.time_format,
            "pipeline": cfg.as_dict(),
        },
        extra_arrays={"norm_mins": params.mins, "norm_maxs": params.maxs},
    )
    report_path = args.report or args.out + ".report.json"
    with open(report_path, "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    print(f"patches={report.patch_count} q_train={report.q_train} "
          f"q_test={report.q_test} n={report.n}")
    print(f"train_mae={report.train_mae:.6f} test_mae={report.test_mae:.6f} "
          f"baseline_test_mae={report.baseline_test_mae:.6f}")
    print(f"train_seconds={report.train_seconds:.3f} "
          f"test_seconds={report.test_seconds:.3f}")
    print(f"wrote {args.out}")
    print(f"wrote {report_path}")
    return EXIT_OK


def cmd_forecast(args):
    model, extra, extra_arrays = load_model(args.model)
    if not extra or "names" not in extra:
        raise DataFormatError(f"{args.model}: snapshot lacks pipeline metadata")
    names = list(extra["names"])
    interval = float(extra["interval"])
    pipeline = extra["pipeline"]
    r, l = int(pipeline["r"]), int(pipeline["l"])
    params = data_mod.NormalizationParams(
        names, extra_arrays["norm_mins"], extra_arrays["norm_maxs"]
    )

    recent = data_mod.load_csv(args.input).select(names)
    recent = data_mod.clean(recent, interval)
    if recent.t < r:
        raise ValidationError(
            f"insufficient history: forecasting requires at least R={r} "
            f"timestamps, got {recent.t}"
        )
    tail = data_mod.TimeSeries(
        names,
        recent.timestamps[-r:].copy(),
        recent.values[:, -r:].copy(),
        recent.time_format,
    )
    normalized = data_mod.normalize_apply(tail, params)
    row = data_mod.flatten_block(normalized.values).reshape(1, -1)
    prediction = model.predict(row)  # (1, M*l) in (0, 1)
    block = data_mod.unflatten_window(prediction[0], len(names))  # (M, l)
    denorm = data_mod.normalize_invert(block, params)

    last_ts = float(recent.timestamps[-1])
    writer_target = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(writer_target)
        writer.writerow(["timestamp"] + names)
        for step in range(l):
            ts = data_mod.format_timestamp(
                last_ts + (step + 1) * interval, recent.time_format
            )
            writer.writerow([ts] + [repr(float(v)) for v in denorm[:, step]])
    finally:
        if args.out:
            writer_target.close()
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


def _parse_grid(text, name):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"bad {name} grid {text!r}") from None
    if not values:
        raise ValidationError(f"empty {name} grid")
    return sorted(set(values))


def cmd_sweep(args):
    base = _config_kwargs(args)
    base.pop("lags", None)
    base.pop("horizon", None)
    base.pop("smooth_window", None)
    l_grid = _parse_grid(args.l_grid, "L")
    w_grid = _parse_grid(args.w_grid, "w")
    probe_cfg = PipelineConfig(lags=l_grid[0], horizon=l_grid[0], **base)
    series, _ = _load_clean_series(args.input, probe_cfg, args.interval)

    rows = []
    for l_value in l_grid:
        for w_value in w_grid:
            cell = {"l": l_value, "w": w_value}
            try:
                cell_cfg = PipelineConfig(
                    lags=l_value, horizon=l_value, smooth_window=w_value, **base
                )
                _, report = run_online(series, cell_cfg)
            except LstcnError as exc:
                cell.update(status="error", error=str(exc))
            else:
                cell.update(
                    status="ok",
                    error="",
                    train_mae=report.train_mae,
                    test_mae=report.test_mae,
                    baseline_test_mae=report.baseline_test_mae,
                    train_seconds=round(report.train_seconds, 3),
                    test_seconds=round(report.test_seconds, 3),
                    patch_count=report.patch_count,
                )
            rows.append(cell)

    fields = [
        "l", "w", "status", "train_mae", "test_mae", "baseline_test_mae",
        "train_seconds", "test_seconds", "patch_count", "error",
    ]
    target = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(target, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({f: row.get(f, "") for f in fields})
    finally:
        if args.out:
            target.close()
    if args.out:
        print(f"wrote {args.out}")
    failures = sum(1 for row in rows if row["status"] != "ok")
    print(f"cells={len(rows)} failed={failures}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lstcn",
        description="Online multivariate time-series forecasting with "
                    "chained cognitive blocks and a closed-form ridge fit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prep = sub.add_parser("prepare", help="clean, normalize, window, export")
    p_prep.add_argument("input", help="input CSV (timestamp + variable columns)")
    _add_config_flags(p_prep)
    p_prep.add_argument("--out", required=True, help="output window-set file")
    p_prep.set_defaults(func=cmd_prepare)

    p_train = sub.add_parser("train", help="run the online pipeline, save model")
    p_train.add_argument("input", help="input CSV")
    _add_config_flags(p_train)
    p_train.add_argument("--out", required=True, help="model snapshot path")
    p_train.add_argument("--report", help="report JSON path "
                                          "(default: <out>.report.json)")
    p_train.set_defaults(func=cmd_train)

    p_fc = sub.add_parser("forecast", help="L-step-ahead forecast from a snapshot")
    p_fc.add_argument("model", help="model snapshot from `train`")
    p_fc.add_argument("input", help="recent-history CSV (>= R timestamps)")
    p_fc.add_argument("--out", help="forecast CSV path (default: stdout)")
    p_fc.set_defaults(func=cmd_forecast)

    p_sweep = sub.add_parser("sweep", help="benchmark a grid over L and w")
    p_sweep.add_argument("input", help="input CSV")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--l-grid", required=True, help="comma list, e.g. 6,48,72")
    p_sweep.add_argument("--w-grid", required=True, help="comma list, e.g. 1,10")
    p_sweep.add_argument("--out", help="sweep CSV path (default: stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SingularMatrixError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, ShapeError, NotFittedError, LstcnError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
