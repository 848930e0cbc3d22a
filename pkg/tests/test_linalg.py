import numpy as np
import pytest

from lstcn import ShapeError, SingularMatrixError, ValidationError
from lstcn.linalg import broadcast_add_row, matmul, ridge_solve


def matmul_oracle(a, b):
    """Entry-by-entry triple loop, independent of the library path."""
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


class TestMatmul:
    def test_identity(self):
        x = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        assert np.array_equal(matmul(np.eye(2), x), x)

    def test_hand_checked(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[1.0], [1.0]])
        assert np.array_equal(matmul(a, b), np.array([[3.0], [7.0]]))

    def test_against_triple_loop_oracle(self):
        rng = np.random.default_rng(10)
        a = rng.standard_normal((5, 7))
        b = rng.standard_normal((7, 3))
        expected = matmul_oracle(a, b)
        assert np.abs(matmul(a, b) - expected).max() < 1e-12

    def test_dimension_mismatch_names_both_operands(self):
        with pytest.raises(ShapeError, match=r"2x3.*4x2"):
            matmul(np.ones((2, 3)), np.ones((4, 2)))

    def test_associativity(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            dims = rng.integers(1, 8, size=4)
            a = rng.standard_normal((dims[0], dims[1]))
            b = rng.standard_normal((dims[1], dims[2]))
            c = rng.standard_normal((dims[2], dims[3]))
            left = matmul(matmul(a, b), c)
            right = matmul(a, matmul(b, c))
            scale = max(np.abs(left).max(), 1.0)
            assert np.abs(left - right).max() / scale < 1e-10

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            matmul(np.array([[np.nan, 1.0]]), np.ones((2, 1)))


class TestBroadcastAddRow:
    def test_zero_vector_is_identity(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(broadcast_add_row(m, np.zeros((1, 2))), m)

    def test_hand_checked(self):
        m = np.array([[1.0, 1.0], [2.0, 2.0]])
        v = np.array([[10.0, 20.0]])
        assert np.array_equal(
            broadcast_add_row(m, v), np.array([[11.0, 21.0], [12.0, 22.0]])
        )

    def test_against_per_row_loop(self):
        rng = np.random.default_rng(12)
        m = rng.standard_normal((4, 3))
        v = rng.standard_normal((1, 3))
        expected = np.array([m[i] + v[0] for i in range(4)])
        assert np.array_equal(broadcast_add_row(m, v), expected)

    def test_column_mismatch(self):
        with pytest.raises(ShapeError):
            broadcast_add_row(np.ones((2, 3)), np.ones((1, 2)))


def ridge_residual(phi, y, b, lam):
    """Relative norm of the normal-equation residual, dead columns
    penalized the same way the solver does."""
    gram = phi.T @ phi
    diag = np.diagonal(gram)
    penalty = lam * np.where(diag > 0.0, diag, 1e-8)
    lhs = gram @ b + penalty[:, None] * b
    rhs = phi.T @ y
    return np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)


class TestRidgeSolve:
    def test_square_nonsingular_interpolates(self):
        rng = np.random.default_rng(13)
        phi = rng.standard_normal((6, 6)) + 3.0 * np.eye(6)
        y = rng.standard_normal((6, 2))
        b = ridge_solve(phi, y, 0.0)
        rel = np.linalg.norm(phi @ b - y) / np.linalg.norm(y)
        assert rel < 1e-9

    def test_scalar_regression_mean(self):
        phi = np.array([[1.0], [1.0]])
        y = np.array([[1.0], [3.0]])
        b = ridge_solve(phi, y, 0.0)
        assert b.shape == (1, 1)
        assert abs(b[0, 0] - 2.0) < 1e-12

    def test_normal_equation_residual(self):
        rng = np.random.default_rng(14)
        phi = rng.standard_normal((50, 5))
        y = rng.standard_normal((50, 3))
        b = ridge_solve(phi, y, 0.01)
        assert ridge_residual(phi, y, b, 0.01) < 1e-8

    def test_residual_invariant_random_instances(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            c = int(rng.integers(5, 80))
            n = int(rng.integers(1, min(c, 20) + 1))
            k = int(rng.integers(1, 6))
            lam = float(rng.choice([0.0, 0.01, 1.0]))
            phi = rng.standard_normal((c, n))
            y = rng.standard_normal((c, k))
            b = ridge_solve(phi, y, lam)
            assert ridge_residual(phi, y, b, lam) < 1e-8

    def test_matches_independent_least_squares_oracle(self):
        # lam=0 on full-column-rank phi equals the pseudoinverse solution;
        # the oracle goes through numpy's lstsq (SVD), not our Cholesky.
        rng = np.random.default_rng(16)
        phi = rng.standard_normal((40, 7))
        y = rng.standard_normal((40, 2))
        b = ridge_solve(phi, y, 0.0)
        expected = np.linalg.lstsq(phi, y, rcond=None)[0]
        rel = np.abs(b - expected).max() / np.abs(expected).max()
        assert rel < 1e-8

    def test_singular_with_zero_lambda_raises(self):
        phi = np.ones((10, 3))  # rank 1
        y = np.ones((10, 1))
        with pytest.raises(SingularMatrixError, match="lambda > 0"):
            ridge_solve(phi, y, 0.0)

    def test_dead_column_with_positive_lambda_is_solvable(self):
        rng = np.random.default_rng(17)
        phi = rng.standard_normal((20, 4))
        phi[:, 2] = 0.0  # dead column
        y = rng.standard_normal((20, 2))
        b = ridge_solve(phi, y, 0.5)
        assert np.isfinite(b).all()
        assert np.abs(b[2]).max() < 1e-9  # no signal, no weight

    def test_non_finite_inputs_rejected(self):
        phi = np.ones((3, 2))
        bad = phi.copy()
        bad[0, 0] = np.inf
        with pytest.raises(ValidationError):
            ridge_solve(bad, np.ones((3, 1)), 0.1)
        with pytest.raises(ValidationError):
            ridge_solve(phi, np.full((3, 1), np.nan), 0.1)

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValidationError):
            ridge_solve(np.ones((3, 2)), np.ones((3, 1)), -0.1)

    def test_row_count_mismatch(self):
        with pytest.raises(ShapeError):
            ridge_solve(np.ones((3, 2)), np.ones((4, 1)), 0.1)
