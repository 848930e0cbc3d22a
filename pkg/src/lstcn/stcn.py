"""One short-term cognitive block: two sigmoid gates and a closed-form fit.

The block maps a patch of flattened input windows through a frozen input
gate into a hidden state H, then through a learnable output gate.  The
output gate is fitted in one shot: targets go to logit space, the hidden
columns are standardized, a ridge system is solved on (H | ones), and the
weights are folded back to the original scale.  Everything here is a pure
function; fitting the output gate never touches the input-gate weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import _kernels, linalg
from .exceptions import ShapeError, ValidationError

# Columns whose standard deviation falls below this are treated as dead:
# they pass through standardization unchanged (mean 0, scale 1).
DEAD_SIGMA_TOL = 1e-12


@dataclass(frozen=True)
class ActivationConfig:
    """Fit-time knobs: ridge penalty and the logit clipping margin."""

    ridge_lambda: float = 1e-2
    logit_epsilon: float = 1e-6

    def __post_init__(self):
        if not np.isfinite(self.ridge_lambda) or self.ridge_lambda < 0.0:
            raise ValidationError(
                f"ridge_lambda must be >= 0, got {self.ridge_lambda}"
            )
        if not 0.0 < self.logit_epsilon < 0.5:
            raise ValidationError(
                f"logit_epsilon must lie in (0, 0.5), got {self.logit_epsilon}"
            )


@dataclass(frozen=True)
class StcnWeights:
    """The four matrices of one block.

    w_in/b_in drive the input gate and are frozen during the block's fit;
    w_out/b_out drive the output gate and are the learned weights.
    """

    w_in: np.ndarray   # (N, N) frozen prior weights
    b_in: np.ndarray   # (1, N) frozen prior bias
    w_out: np.ndarray  # (N, N) learned weights
    b_out: np.ndarray  # (1, N) learned bias

    def __post_init__(self):
        w_in = linalg.as_matrix(self.w_in, "w_in")
        b_in = linalg.as_row_vector(self.b_in, "b_in")
        w_out = linalg.as_matrix(self.w_out, "w_out")
        b_out = linalg.as_row_vector(self.b_out, "b_out")
        n = w_in.shape[0]
        for name, mat in (("w_in", w_in), ("w_out", w_out)):
            if mat.shape != (n, n):
                raise ShapeError(f"{name} must be {n}x{n}, got {mat.shape}")
        for name, vec in (("b_in", b_in), ("b_out", b_out)):
            if vec.shape != (1, n):
                raise ShapeError(f"{name} must be 1x{n}, got {vec.shape}")
        for name, arr in (
            ("w_in", w_in), ("b_in", b_in), ("w_out", w_out), ("b_out", b_out)
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.w_in.shape[0]


def sigmoid(x):
    """Logistic function 1/(1+e^-x), elementwise on arrays.

    Saturates to the interval boundary in float64 for |x| beyond ~37.
    """
    return expit(x)


def logit(p, eps):
    """Inverse sigmoid ln(p'/(1-p')) with p clipped to [eps, 1-eps].

    Exact inverse of `sigmoid` on (eps, 1-eps); finite everywhere after
    clipping, so targets of exactly 0 or 1 stay usable.
    """
    if not 0.0 < eps < 0.5:
        raise ValidationError(f"eps must lie in (0, 0.5), got {eps}")
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 2 and p.flags.c_contiguous:
        return _kernels.logit(p, eps)
    out = _kernels.logit(np.ascontiguousarray(p).reshape(1, -1), float(eps))
    return out.reshape(p.shape) if p.ndim else float(out[0, 0])


def _gate(x, w, b, x_name):
    x = linalg.as_matrix(x, x_name)
    w = linalg.as_matrix(w, "gate weights")
    b = linalg.as_row_vector(b, "gate bias")
    if x.shape[1] != w.shape[0]:
        raise ShapeError(
            f"{x_name} has {x.shape[1]} columns but gate weights have "
            f"{w.shape[0]} rows"
        )
    if b.shape[1] != w.shape[1]:
        raise ShapeError(
            f"gate bias has {b.shape[1]} columns but gate weights have "
            f"{w.shape[1]}"
        )
    return _kernels.affine_sigmoid(
        np.ascontiguousarray(x), np.ascontiguousarray(w), np.ascontiguousarray(b)
    )


def input_gate(inputs, w_in, b_in):
    """Hidden state H = sigmoid(inputs @ w_in + b_in), rows broadcast."""
    return _gate(inputs, w_in, b_in, "inputs")


def output_gate(hidden, w_out, b_out):
    """Block output = sigmoid(hidden @ w_out + b_out), rows broadcast."""
    return _gate(hidden, w_out, b_out, "hidden state")


def standardize_columns(h, dead_tol=DEAD_SIGMA_TOL):
    """Per-column z-scoring statistics for the hidden state.

    Returns (standardized, mu, sigma).  Columns with standard deviation
    below `dead_tol` are passed through unchanged (mu 0, sigma 1): zeroing
    them out instead would permanently erase the weight mass that lets a
    cold-started chain pick up input structure on later patches.
    """
    mu = h.mean(axis=0)
    sigma = h.std(axis=0)
    dead = sigma < dead_tol
    mu = np.where(dead, 0.0, mu)
    sigma = np.where(dead, 1.0, sigma)
    return (h - mu) / sigma, mu, sigma


def fit_output_gate(hidden, targets, cfg):
    """Closed-form ridge fit of the output gate.

    Targets are mapped to logit space, the hidden columns are z-scored,
    the system (H_std | ones) B = logit(targets) is ridge-solved with the
    Gram-diagonal penalty (bias row last), and the solution is folded
    back into original-scale weights.

    Parameters
    ----------
    hidden : ndarray, shape (C, N)
        Input-gate activations for the patch.
    targets : ndarray, shape (C, N)
        Expected block outputs, values in [0, 1].
    cfg : ActivationConfig

    Returns
    -------
    (w_out, b_out) : ndarrays of shapes (N, N) and (1, N), original scale.
    """
    hidden = linalg.as_matrix(hidden, "hidden state")
    targets = linalg.as_matrix(targets, "targets")
    if hidden.shape != targets.shape:
        raise ShapeError(
            f"hidden state is {hidden.shape[0]}x{hidden.shape[1]} but targets "
            f"are {targets.shape[0]}x{targets.shape[1]}"
        )
    c, n = hidden.shape
    if c < 1:
        raise ValidationError("empty patch: need at least one example row")

    y = _kernels.logit(np.ascontiguousarray(targets), cfg.logit_epsilon)
    h_std, mu, sigma = standardize_columns(hidden)

    phi = np.empty((c, n + 1), dtype=np.float64)
    phi[:, :n] = h_std
    phi[:, n] = 1.0
    solution = linalg.ridge_solve(phi, y, cfg.ridge_lambda)

    w_std = solution[:n, :]
    b_std = solution[n:, :]
    # Fold the z-scoring back so the returned weights act on raw H:
    # w = w_std / sigma (per row), b = b_std - mu @ w.
    w_out = w_std / sigma[:, None]
    b_out = b_std - mu @ w_out
    return w_out, b_out
