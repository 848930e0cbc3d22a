# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core: fused gate evaluation, clipped logit transform,
and the regularized Gram solve, over BLAS/LAPACK.

Mirrors the NumPy reference implementations in lstcn._kernels; selected
at import when built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log
from scipy.linalg.cython_blas cimport dgemm
from scipy.linalg.cython_lapack cimport dposv

from .exceptions import SingularMatrixError

cnp.import_array()

_SINGULAR_MSG = (
    "regularized normal equations are not positive definite; "
    "the system is singular with lambda == 0 -- use lambda > 0"
)


def affine_sigmoid(const double[:, ::1] x, const double[:, ::1] w,
                   const double[:, ::1] b):
    """sigmoid(x @ w + b) with the bias add and activation fused."""
    cdef int c = x.shape[0]
    cdef int n = x.shape[1]
    cdef int k = w.shape[1]
    out_arr = np.empty((c, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double alpha = 1.0, beta = 0.0
    cdef int i, j
    cdef double z
    # Row-major product via the column-major identity (XW)^T = W^T X^T.
    dgemm("N", "N", &k, &c, &n, &alpha, <double*>&w[0, 0], &k,
          <double*>&x[0, 0], &n, &beta, &out[0, 0], &k)
    with nogil:
        for i in range(c):
            for j in range(k):
                z = out[i, j] + b[0, j]
                out[i, j] = 1.0 / (1.0 + exp(-z))
    return out_arr


def logit(const double[:, ::1] p, double eps):
    """log(p'/(1-p')) with p clipped to [eps, 1-eps]."""
    cdef int c = p.shape[0]
    cdef int n = p.shape[1]
    out_arr = np.empty((c, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double lo = eps, hi = 1.0 - eps
    cdef double v
    cdef int i, j
    with nogil:
        for i in range(c):
            for j in range(n):
                v = p[i, j]
                if v < lo:
                    v = lo
                elif v > hi:
                    v = hi
                out[i, j] = log(v / (1.0 - v))
    return out_arr


def ridge_solve_sym(const double[:, ::1] phi, const double[:, ::1] y,
                    double lam, double dead_eps):
    """Solve (phi^T phi + lam*Omega) B = phi^T y via Cholesky (dposv).

    Omega is the diagonal of phi^T phi; zero diagonal entries (dead
    columns) are penalized with lam*dead_eps instead.
    """
    cdef int c = phi.shape[0]
    cdef int p = phi.shape[1]
    cdef int k = y.shape[1]
    cdef double alpha = 1.0, beta = 0.0
    cdef int j, info = 0

    # Gram matrix: with the C-order buffer seen column-major as phi^T,
    # dgemm("N","T") yields phi^T phi; the result is symmetric so its
    # storage order is immaterial.
    gram_arr = np.empty((p, p), dtype=np.float64)
    cdef double[:, ::1] gram = gram_arr
    dgemm("N", "T", &p, &p, &c, &alpha, <double*>&phi[0, 0], &p,
          <double*>&phi[0, 0], &p, &beta, &gram[0, 0], &p)

    cdef double d
    for j in range(p):
        d = gram[j, j]
        gram[j, j] = d + lam * (d if d > 0.0 else dead_eps)

    # Right-hand side phi^T y, built column-major (F-order) for dposv.
    rhs_arr = np.empty((p, k), dtype=np.float64, order="F")
    cdef double[::1, :] rhs = rhs_arr
    dgemm("N", "T", &p, &k, &c, &alpha, <double*>&phi[0, 0], &p,
          <double*>&y[0, 0], &k, &beta, &rhs[0, 0], &p)

    dposv("L", &p, &k, &gram[0, 0], &p, &rhs[0, 0], &p, &info)
    if info != 0:
        raise SingularMatrixError(_SINGULAR_MSG)
    return np.ascontiguousarray(rhs_arr)
