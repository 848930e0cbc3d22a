"""Hot numerical kernels with backend selection.

Three operations dominate a training run: the fused affine-sigmoid gate
evaluation, the clipped inverse-sigmoid target transform, and the
regularized least-squares solve on the Gram matrix.  A compiled extension
(``lstcn._core``, Cython over BLAS/LAPACK) provides them when built; the
NumPy implementations below are the fallback and the reference.

Backend choice happens at import time and can be forced with the
``LSTCN_BACKEND`` environment variable (``compiled`` or ``numpy``).
All kernels are pure functions of their inputs and thread-safe.
"""

import os

import numpy as np
import scipy.linalg
from scipy.special import expit
from scipy.special import logit as _scipy_logit

from .exceptions import SingularMatrixError

_SINGULAR_MSG = (
    "regularized normal equations are not positive definite; "
    "the system is singular with lambda == 0 -- use lambda > 0"
)


def _np_affine_sigmoid(x, w, b):
    """sigmoid(x @ w + b) with b broadcast over rows."""
    z = x @ w
    z += b
    return expit(z)


def _np_logit(p, eps):
    """log(p'/(1-p')) with p clipped to [eps, 1-eps]."""
    return _scipy_logit(np.clip(p, eps, 1.0 - eps))


def _np_ridge_solve_sym(phi, y, lam, dead_eps):
    """Solve (phi^T phi + lam*Omega) B = phi^T y via Cholesky.

    Omega is the diagonal of phi^T phi; a zero diagonal entry (dead
    column) is penalized with lam*dead_eps instead so the system stays
    solvable.  Raises SingularMatrixError when the regularized matrix is
    not positive definite (e.g. rank-deficient phi with lam == 0).
    """
    gram = phi.T @ phi
    diag = np.diagonal(gram).copy()
    penalty = lam * np.where(diag > 0.0, diag, dead_eps)
    gram[np.diag_indices_from(gram)] += penalty
    rhs = phi.T @ y
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(_SINGULAR_MSG) from exc
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


NUMPY_KERNELS = {
    "affine_sigmoid": _np_affine_sigmoid,
    "logit": _np_logit,
    "ridge_solve_sym": _np_ridge_solve_sym,
}


def _load_compiled():
    from . import _core

    return {
        "affine_sigmoid": _core.affine_sigmoid,
        "logit": _core.logit,
        "ridge_solve_sym": _core.ridge_solve_sym,
    }


_requested = os.environ.get("LSTCN_BACKEND", "").strip().lower()
if _requested == "numpy":
    BACKEND = "numpy"
    _active = NUMPY_KERNELS
elif _requested == "compiled":
    BACKEND = "compiled"
    _active = _load_compiled()  # raises if the extension is missing
else:
    try:
        _active = _load_compiled()
        BACKEND = "compiled"
    except ImportError:
        _active = NUMPY_KERNELS
        BACKEND = "numpy"

affine_sigmoid = _active["affine_sigmoid"]
logit = _active["logit"]
ridge_solve_sym = _active["ridge_solve_sym"]


def available_backends():
    """Names of the kernel sets importable in this environment."""
    names = ["numpy"]
    try:
        _load_compiled()
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_kernels(backend):
    """Kernel dict for an explicit backend name ("compiled" or "numpy")."""
    if backend == "numpy":
        return NUMPY_KERNELS
    if backend == "compiled":
        return _load_compiled()
    raise ValueError(f"unknown backend {backend!r}")
