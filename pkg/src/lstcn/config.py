"""Run configuration shared by the library pipeline and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

from .exceptions import ValidationError

PRIOR_ZEROS = "zeros"
PRIOR_WARMUP = "warmup"


@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end run settings.

    Equal lags and horizon are required: the block weight matrices are
    square, so the input and output widths must match.
    """

    lags: int                       # past steps per window (R)
    horizon: int                    # steps ahead to forecast (L)
    stride: int = 1
    patch_size: int = 1024
    ridge_lambda: float = 1e-2
    logit_epsilon: float = 1e-6
    prior_mode: str = PRIOR_WARMUP  # "zeros" | "warmup"
    smooth_window: int = 10         # moving-average width for warm-up
    train_fraction: float = 0.8
    variables: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.lags < 1 or self.horizon < 1:
            raise ValidationError(
                f"lags and horizon must be >= 1, got {self.lags}, {self.horizon}"
            )
        if self.lags != self.horizon:
            raise ValidationError(
                f"lags must equal horizon (square block weights), "
                f"got lags={self.lags}, horizon={self.horizon}"
            )
        if self.stride < 1:
            raise ValidationError(f"stride must be >= 1, got {self.stride}")
        if self.patch_size < 1:
            raise ValidationError(f"patch_size must be >= 1, got {self.patch_size}")
        if self.ridge_lambda < 0:
            raise ValidationError(f"ridge_lambda must be >= 0, got {self.ridge_lambda}")
        if not 0.0 < self.logit_epsilon < 0.5:
            raise ValidationError(
                f"logit_epsilon must lie in (0, 0.5), got {self.logit_epsilon}"
            )
        if self.prior_mode not in (PRIOR_ZEROS, PRIOR_WARMUP):
            raise ValidationError(
                f"prior_mode must be '{PRIOR_ZEROS}' or '{PRIOR_WARMUP}', "
                f"got {self.prior_mode!r}"
            )
        if self.smooth_window < 1:
            raise ValidationError(
                f"smooth_window must be >= 1, got {self.smooth_window}"
            )
        if not 0.0 < self.train_fraction < 1.0:
            raise ValidationError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}"
            )
        if self.variables is not None:
            object.__setattr__(self, "variables", tuple(self.variables))

    def as_dict(self) -> dict:
        return {
            "r": self.lags,
            "l": self.horizon,
            "stride": self.stride,
            "patch_size": self.patch_size,
            "lambda": self.ridge_lambda,
            "epsilon": self.logit_epsilon,
            "prior": self.prior_mode,
            "smooth_w": self.smooth_window,
            "train_frac": self.train_fraction,
            "vars": list(self.variables) if self.variables else None,
        }


# Keys accepted in flat key=value config files, mapped to constructor
# arguments.  The CLI uses the same names as its flags.
_FILE_KEYS = {
    "r": ("lags", int),
    "l": ("horizon", int),
    "stride": ("stride", int),
    "patch_size": ("patch_size", int),
    "patch-size": ("patch_size", int),
    "lambda": ("ridge_lambda", float),
    "epsilon": ("logit_epsilon", float),
    "prior": ("prior_mode", str),
    "smooth_w": ("smooth_window", int),
    "smooth-w": ("smooth_window", int),
    "train_frac": ("train_fraction", float),
    "train-frac": ("train_fraction", float),
    "vars": ("variables", lambda s: tuple(v.strip() for v in s.split(",") if v.strip())),
}


def parse_config_file(path) -> dict:
    """Parse a flat `key = value` file into PipelineConfig kwargs.

    Blank lines and `#` comments are ignored; unknown keys are an error.
    """
    kwargs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValidationError(
                    f"{path}: line {lineno}: expected 'key = value', got {text!r}"
                )
            key, value = (part.strip() for part in text.split("=", 1))
            if key not in _FILE_KEYS:
                raise ValidationError(f"{path}: line {lineno}: unknown key {key!r}")
            name, conv = _FILE_KEYS[key]
            try:
                kwargs[name] = conv(value)
            except ValueError:
                raise ValidationError(
                    f"{path}: line {lineno}: bad value {value!r} for {key!r}"
                ) from None
    return kwargs
