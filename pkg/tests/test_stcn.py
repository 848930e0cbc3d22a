import math

import numpy as np
import pytest

from lstcn import ShapeError, ValidationError
from lstcn.stcn import (
    ActivationConfig,
    StcnWeights,
    fit_output_gate,
    input_gate,
    logit,
    output_gate,
    sigmoid,
    standardize_columns,
)

# 1/(1+e^-2) evaluated with mpmath at 50 digits, rounded to float64.
SIGMOID_AT_2 = 0.8807970779778824
# ln((1-1e-6)/1e-6)
LOGIT_ONE_EPS6 = 13.815509557963773


class TestSigmoid:
    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    def test_symmetry(self):
        for x in np.linspace(-20, 20, 41):
            assert abs(sigmoid(x) - (1.0 - sigmoid(-x))) < 1e-15

    def test_frozen_high_precision_value(self):
        assert abs(sigmoid(2.0) - SIGMOID_AT_2) < 1e-15

    def test_monotone(self):
        xs = np.linspace(-10, 10, 201)
        ys = sigmoid(xs)
        assert np.all(np.diff(ys) > 0)


class TestLogit:
    def test_midpoint(self):
        assert logit(0.5, 1e-9) == 0.0

    def test_round_trip_with_sigmoid(self):
        # float64 representation of sigmoid near saturation already costs
        # ~1e-12 at |x|=10, so the bound sits just above that floor
        for x in np.linspace(-10, 10, 81):
            assert abs(logit(sigmoid(x), 1e-9) - x) < 2e-12

    def test_clamped_boundary(self):
        # clamping at fl(1 - 1e-6) shifts the exact ln((1-eps)/eps) by ~3e-11
        assert abs(logit(1.0, 1e-6) - LOGIT_ONE_EPS6) < 1e-9
        assert abs(logit(0.0, 1e-6) + LOGIT_ONE_EPS6) < 1e-9

    def test_array_input(self):
        p = np.array([[0.5, 0.25], [0.75, 1.0]])
        out = logit(p, 1e-6)
        assert out.shape == p.shape
        assert out[0, 0] == 0.0
        assert abs(out[0, 1] - math.log(0.25 / 0.75)) < 1e-14

    def test_bad_eps(self):
        with pytest.raises(ValidationError):
            logit(0.5, 0.7)


class TestGates:
    def test_zero_weights_give_half(self):
        p1 = np.random.default_rng(0).uniform(0, 1, (5, 3))
        h = input_gate(p1, np.zeros((3, 3)), np.zeros((1, 3)))
        assert np.array_equal(h, np.full((5, 3), 0.5))

    def test_zero_input_passes_only_bias(self):
        rng = np.random.default_rng(1)
        w = rng.standard_normal((3, 3))
        b = rng.standard_normal((1, 3))
        h = input_gate(np.zeros((4, 3)), w, b)
        expected_row = sigmoid(b[0])
        for i in range(4):
            assert np.abs(h[i] - expected_row).max() < 1e-15

    def test_against_scalar_loop_oracle(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((3, 2))
        w = rng.standard_normal((2, 2))
        b = rng.standard_normal((1, 2))
        got = input_gate(x, w, b)
        for i in range(3):
            for j in range(2):
                z = b[0, j]
                for k in range(2):
                    z += x[i, k] * w[k, j]
                assert abs(got[i, j] - 1.0 / (1.0 + math.exp(-z))) < 1e-12

    def test_output_gate_same_functional_form(self):
        rng = np.random.default_rng(3)
        h = rng.uniform(0, 1, (6, 4))
        w = rng.standard_normal((4, 4))
        b = rng.standard_normal((1, 4))
        assert np.array_equal(output_gate(h, w, b), input_gate(h, w, b))

    def test_outputs_strictly_inside_unit_interval(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = rng.uniform(-3, 3, (10, 5))
            w = rng.standard_normal((5, 5))
            b = rng.standard_normal((1, 5))
            h = input_gate(x, w, b)
            assert np.all(h > 0.0) and np.all(h < 1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            input_gate(np.ones((2, 3)), np.ones((4, 4)), np.ones((1, 4)))
        with pytest.raises(ShapeError):
            input_gate(np.ones((2, 3)), np.ones((3, 3)), np.ones((1, 2)))


class TestStcnWeights:
    def test_validates_square_and_matching(self):
        with pytest.raises(ShapeError):
            StcnWeights(np.ones((3, 2)), np.ones((1, 3)),
                        np.ones((3, 3)), np.ones((1, 3)))
        with pytest.raises(ShapeError):
            StcnWeights(np.ones((3, 3)), np.ones((1, 2)),
                        np.ones((3, 3)), np.ones((1, 3)))

    def test_rejects_non_finite(self):
        bad = np.ones((2, 2))
        bad[0, 0] = np.nan
        with pytest.raises(ValidationError):
            StcnWeights(bad, np.ones((1, 2)), np.ones((2, 2)), np.ones((1, 2)))

    def test_stored_arrays_are_write_protected(self):
        w = StcnWeights(np.zeros((2, 2)), np.zeros((1, 2)),
                        np.zeros((2, 2)), np.zeros((1, 2)))
        with pytest.raises(ValueError):
            w.w_in[0, 0] = 1.0


class TestFitOutputGate:
    CFG = ActivationConfig(ridge_lambda=0.01, logit_epsilon=1e-6)

    def test_constant_half_targets_give_zero_weights(self):
        h = np.full((8, 3), 0.5)
        p2 = np.full((8, 3), 0.5)
        w2, b2 = fit_output_gate(h, p2, self.CFG)
        assert np.abs(w2).max() < 1e-12
        assert np.abs(b2).max() < 1e-12
        recon = output_gate(h, w2, b2)
        assert np.abs(recon - 0.5).max() < 1e-12

    def test_generate_then_recover(self):
        rng = np.random.default_rng(5)
        cfg = ActivationConfig(ridge_lambda=0.0, logit_epsilon=1e-9)
        for _ in range(10):
            n = int(rng.integers(2, 12))
            c = int(rng.integers(n + 1, 4 * n + 2))
            h = rng.uniform(0, 1, (c, n))
            w_true = rng.standard_normal((n, n)) / np.sqrt(n)
            b_true = rng.standard_normal((1, n)) * 0.3
            p2 = output_gate(h, w_true, b_true)
            w_fit, b_fit = fit_output_gate(h, p2, cfg)
            recon = output_gate(h, w_fit, b_fit)
            assert np.abs(recon - p2).max() < 1e-6

    def test_optimality_residual_in_standardized_coordinates(self):
        rng = np.random.default_rng(6)
        c, n = 60, 5
        h = rng.uniform(0, 1, (c, n))
        p2 = rng.uniform(0.05, 0.95, (c, n))
        lam = 0.01
        w2, b2 = fit_output_gate(h, p2, ActivationConfig(lam, 1e-6))
        h_std, mu, sigma = standardize_columns(h)
        phi = np.hstack([h_std, np.ones((c, 1))])
        # invert the fold-back to recover the standardized-solution stack
        w_std = w2 * sigma[:, None]
        b_std = b2 + mu @ w2
        stacked = np.vstack([w_std, b_std])
        y = logit(p2, 1e-6)
        gram = phi.T @ phi
        omega = np.diag(np.diagonal(gram))
        resid = gram @ stacked + lam * omega @ stacked - phi.T @ y
        assert np.linalg.norm(resid) / np.linalg.norm(phi.T @ y) < 1e-8

    def test_deterministic_bitwise(self):
        rng = np.random.default_rng(7)
        h = rng.uniform(0, 1, (30, 4))
        p2 = rng.uniform(0, 1, (30, 4))
        w_a, b_a = fit_output_gate(h, p2, self.CFG)
        w_b, b_b = fit_output_gate(h.copy(), p2.copy(), self.CFG)
        assert np.array_equal(w_a, w_b)
        assert np.array_equal(b_a, b_b)

    def test_monotone_regularization(self):
        rng = np.random.default_rng(8)
        c, n = 50, 4
        h = rng.uniform(0, 1, (c, n))
        p2 = rng.uniform(0.1, 0.9, (c, n))
        eps = 1e-6
        y = logit(p2, eps)
        previous = -np.inf
        for lam in (0.0, 0.01, 1.0, 100.0):
            w2, b2 = fit_output_gate(h, p2, ActivationConfig(lam, eps))
            rss = float(((h @ w2 + b2 - y) ** 2).sum())
            assert rss >= previous - 1e-9 * max(1.0, abs(previous))
            previous = rss

    def test_dead_columns_pass_through_unchanged(self):
        # constant hidden column: no centering/scaling, weight stays usable
        h = np.full((16, 2), 0.5)
        h_std, mu, sigma = standardize_columns(h)
        assert np.array_equal(h_std, h)
        assert np.array_equal(mu, np.zeros(2))
        assert np.array_equal(sigma, np.ones(2))

    def test_rejects_empty_and_non_finite(self):
        with pytest.raises((ValidationError, ShapeError)):
            fit_output_gate(np.empty((0, 3)), np.empty((0, 3)), self.CFG)
        bad = np.full((4, 2), 0.5)
        nanful = bad.copy()
        nanful[1, 1] = np.nan
        with pytest.raises(ValidationError):
            fit_output_gate(nanful, bad, self.CFG)
        with pytest.raises(ValidationError):
            fit_output_gate(bad, nanful, self.CFG)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            fit_output_gate(np.full((4, 2), 0.5), np.full((4, 3), 0.5), self.CFG)


class TestActivationConfig:
    def test_validates_ranges(self):
        with pytest.raises(ValidationError):
            ActivationConfig(ridge_lambda=-1.0)
        with pytest.raises(ValidationError):
            ActivationConfig(logit_epsilon=0.0)
        with pytest.raises(ValidationError):
            ActivationConfig(logit_epsilon=0.5)

    def test_defaults(self):
        cfg = ActivationConfig()
        assert cfg.ridge_lambda == 1e-2
        assert cfg.logit_epsilon == 1e-6
