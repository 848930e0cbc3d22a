"""Dense matrix primitives and the regularized least-squares solver.

Matrices are 2-D float64 ndarrays.  All functions are pure and validate
their inputs; shape violations raise ShapeError naming both operands.
The solver works on the regularized normal equations through a Cholesky
factorization (never an explicit inverse) in 64-bit floats.
"""

import numpy as np

from . import _kernels
from .exceptions import ShapeError, ValidationError

# Penalty substituted for a zero Gram diagonal entry (dead column) so the
# regularized system stays solvable: that entry gets lambda * DEAD_COLUMN_EPS.
DEAD_COLUMN_EPS = 1e-8


def as_matrix(a, name="matrix"):
    """Validate and return `a` as a 2-D finite float64 array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be at least 1x1, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return m


def as_row_vector(v, name="row vector"):
    """Validate `v` as a finite float64 row vector of shape (1, n)."""
    r = np.asarray(v, dtype=np.float64)
    if r.ndim == 1:
        r = r.reshape(1, -1)
    if r.ndim != 2 or r.shape[0] != 1:
        raise ShapeError(f"{name} must have a single row, got shape {r.shape}")
    if not np.isfinite(r).all():
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return r


def matmul(a, b):
    """Matrix product a @ b with conformance checking."""
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply: left operand is {a.shape[0]}x{a.shape[1]}, "
            f"right operand is {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def broadcast_add_row(m, v):
    """Add row vector v to every row of m (the row-broadcast addition)."""
    m = as_matrix(m, "matrix")
    v = as_row_vector(v, "row vector")
    if v.shape[1] != m.shape[1]:
        raise ShapeError(
            f"cannot broadcast-add: matrix has {m.shape[1]} columns, "
            f"row vector has {v.shape[1]}"
        )
    return m + v


def ridge_solve(phi, y, lam):
    """Ridge-regularized least squares with a Gram-diagonal penalty.

    Returns B solving (phi^T phi + lam * Omega) B = phi^T y, where Omega
    is the diagonal matrix of phi^T phi.  Equivalent to
    B = (phi^T phi + lam*Omega)^-1 phi^T y but computed via a Cholesky
    factorization of the symmetric positive definite system.

    Parameters
    ----------
    phi : ndarray, shape (C, P)
        Design matrix.
    y : ndarray, shape (C, K)
        Targets.
    lam : float
        Ridge penalty, >= 0.

    Returns
    -------
    B : ndarray, shape (P, K)

    Raises
    ------
    SingularMatrixError
        If the regularized system is not positive definite (singular
        design with lam == 0).
    """
    phi = as_matrix(phi, "design matrix")
    y = as_matrix(y, "target matrix")
    if phi.shape[0] != y.shape[0]:
        raise ShapeError(
            f"design matrix has {phi.shape[0]} rows, targets have {y.shape[0]}"
        )
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0.0:
        raise ValidationError(f"lambda must be a finite non-negative real, got {lam}")
    return _kernels.ridge_solve_sym(phi, y, lam, DEAD_COLUMN_EPS)
