#!/usr/bin/env python3
"""
Test suite for the dense kernels, Adam and the gradient oracle
"""

import math
import os
import sys

import numpy as np
import pytest

# Add the project root to path so we can import our modules
sys.path.append(os.path.join(os.path.dirname(__file__), ".."))  # noqa

from src.errors import InvalidDimensionError, NumericError  # noqa
from src.numerics import (  # noqa
    Adam,
    AdamState,
    Rng,
    activate,
    adam_step,
    affine_forward,
    finite_diff_grad,
    glorot_init,
    mse,
    relative_error,
)
from src.numerics.linalg import mse_grad  # noqa


class TestRng:
    """Test suite for the seeded random streams"""

    def test_same_seed_same_stream(self):
        """Test two generators with one seed draw identical values"""
        a = Rng(7).uniform(0, 1, (3, 4))
        b = Rng(7).uniform(0, 1, (3, 4))
        assert np.array_equal(a, b)

    def test_spawn_is_deterministic_and_distinct(self):
        """Test child streams depend only on seed and index"""
        parent = Rng(3)
        assert np.array_equal(parent.spawn(1).normal(0, 1, 5), Rng(3).spawn(1).normal(0, 1, 5))
        assert not np.array_equal(parent.spawn(0).normal(0, 1, 5), parent.spawn(1).normal(0, 1, 5))

    def test_child_differs_from_parent(self):
        """Test index 0 children are not copies of the stream they came from"""
        assert not np.array_equal(Rng(7).uniform(0, 1, 5), Rng(7).spawn(0).uniform(0, 1, 5))
        child = Rng(3).spawn(1)
        assert not np.array_equal(child.uniform(0, 1, 5), child.spawn(0).uniform(0, 1, 5))

    def test_negative_seed_rejected(self):
        """Test negative seeds raise"""
        with pytest.raises(ValueError):
            Rng(-1)


class TestKernels:
    """Test suite for initialization, affine maps, activations and MSE"""

    def test_glorot_bounds(self):
        """Test Glorot weights stay inside sqrt(6 / (fan_in + fan_out))"""
        W = glorot_init(30, 20, Rng(0))
        limit = math.sqrt(6.0 / 50)
        assert W.shape == (30, 20)
        assert np.all(np.abs(W) <= limit)

    def test_glorot_variance(self):
        """Test 100x100 weights have variance within 10% of 2 / (fan_in + fan_out)"""
        W = glorot_init(100, 100, Rng(3))
        assert abs(W.var() - 0.01) <= 0.001

    def test_glorot_deterministic(self):
        """Test identical seeds give identical weights"""
        assert np.array_equal(glorot_init(4, 3, Rng(5)), glorot_init(4, 3, Rng(5)))

    def test_glorot_zero_dimension(self):
        """Test a zero fan raises"""
        with pytest.raises(InvalidDimensionError):
            glorot_init(0, 3, Rng(0))

    def test_affine_forward_broadcasts_bias(self):
        """Test the bias is added to every row"""
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        W = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        b = np.array([0.5, -0.5, 0.0])
        expected = np.array([[1.5, 1.5, 3.0], [3.5, 3.5, 7.0]])
        assert np.array_equal(affine_forward(x, W, b), expected)

    def test_affine_forward_shape_mismatch(self):
        """Test mismatched inner dimensions raise"""
        with pytest.raises(InvalidDimensionError):
            affine_forward(np.ones((2, 3)), np.ones((2, 2)), np.zeros(2))
        with pytest.raises(InvalidDimensionError):
            affine_forward(np.ones((2, 2)), np.ones((2, 2)), np.zeros(3))

    def test_activations(self):
        """Test tanh, relu and identity element-wise"""
        x = np.array([[-1.0, 0.0, 2.0]])
        assert np.array_equal(activate(x, "relu"), np.array([[0.0, 0.0, 2.0]]))
        assert np.allclose(activate(x, "tanh"), np.tanh(x))
        assert np.array_equal(activate(x, "identity"), x)

    def test_activation_scalar_oracle(self):
        """Test each activation element-wise against math.tanh and max(v, 0)"""
        rng = Rng(4)
        for _ in range(100):
            x = rng.normal(0, 2, (3, 4))
            tanh, relu = activate(x, "tanh"), activate(x, "relu")
            for i in range(3):
                for j in range(4):
                    assert abs(tanh[i, j] - math.tanh(x[i, j])) <= 1e-15
                    assert relu[i, j] == max(x[i, j], 0.0)

    def test_affine_triple_loop_oracle(self):
        """Test x @ W + b against explicit sums"""
        rng = Rng(5)
        for _ in range(100):
            x = rng.normal(0, 1, (3, 4))
            W = rng.normal(0, 1, (4, 2))
            b = rng.normal(0, 1, 2)
            out = affine_forward(x, W, b)
            for i in range(3):
                for k in range(2):
                    expected = sum(x[i, j] * W[j, k] for j in range(4)) + b[k]
                    assert abs(out[i, k] - expected) <= 1e-9

    def test_mse_sums_features_averages_rows(self):
        """Test MSE is the per-row squared error averaged over rows"""
        a = np.array([[1.0, 2.0], [0.0, 0.0]])
        b = np.array([[0.0, 0.0], [0.0, 1.0]])
        # row errors 5 and 1
        assert mse(a, b) == 3.0

    def test_mse_errors(self):
        """Test shape mismatch and empty batches raise"""
        with pytest.raises(InvalidDimensionError):
            mse(np.ones((2, 2)), np.ones((2, 3)))
        with pytest.raises(InvalidDimensionError):
            mse(np.ones((0, 2)), np.ones((0, 2)))

    def test_mse_grad_matches_finite_differences(self):
        """Test the analytic MSE gradient"""
        rng = Rng(1)
        prediction = rng.normal(0, 1, (4, 3))
        target = rng.normal(0, 1, (4, 3))
        numeric = finite_diff_grad(lambda p: mse(p, target), prediction)
        assert relative_error(mse_grad(prediction, target), numeric) < 1e-7


class TestAdam:
    """Test suite for the Adam update"""

    def test_first_step_closed_form(self):
        """Test the first step equals lr * g / (|g| + eps)"""
        param = np.array([1.0, -2.0])
        grad = np.array([0.5, -3.0])
        state = AdamState.fresh(param.shape, lr=0.01)
        updated, new_state = adam_step(param, grad, state)
        expected = param - 0.01 * grad / (np.abs(grad) + state.eps)
        assert np.allclose(updated, expected, rtol=0, atol=1e-15)
        assert new_state.t == 1

    def test_step_is_pure(self):
        """Test inputs are left untouched"""
        param = np.array([1.0])
        state = AdamState.fresh((1,), lr=0.1)
        adam_step(param, np.array([1.0]), state)
        assert param[0] == 1.0
        assert state.t == 0 and state.m[0] == 0.0

    def test_shape_mismatch(self):
        """Test mismatched shapes raise"""
        with pytest.raises(InvalidDimensionError):
            adam_step(np.ones(2), np.ones(3), AdamState.fresh((2,), lr=0.1))

    def test_minimizes_quadratic(self):
        """Test repeated steps on p^2 drive p toward zero"""
        params = {"p": np.array([1.0])}
        optimizer = Adam(lr=0.05)
        for _ in range(1000):
            optimizer.step(params, {"p": 2.0 * params["p"]})
        assert abs(params["p"][0]) < 0.1

    def test_updates_in_place(self):
        """Test the optimizer writes into the parameter arrays it was given"""
        weights = np.array([1.0, 1.0])
        Adam(lr=0.1).step({"w": weights}, {"w": np.array([1.0, -1.0])})
        assert weights[0] < 1.0 < weights[1]


class TestGradientOracle:
    """Test suite for central finite differences"""

    def test_quadratic(self):
        """Test d/dx sum(x^2) = 2x"""
        x = np.array([[1.0, -2.0], [0.5, 3.0]])
        numeric = finite_diff_grad(lambda p: float(np.sum(p**2)), x)
        assert np.allclose(numeric, 2 * x, atol=1e-8)

    def test_parameter_restored(self):
        """Test the perturbed array is unchanged afterwards"""
        x = np.array([0.3, 0.7])
        finite_diff_grad(lambda p: float(np.sum(np.sin(p))), x)
        assert np.array_equal(x, np.array([0.3, 0.7]))

    def test_non_finite_loss(self):
        """Test a non-finite loss raises NumericError"""
        with pytest.raises(NumericError):
            finite_diff_grad(lambda p: float("inf"), np.zeros(2))

    def test_relative_error(self):
        """Test identical and vanishing gradients give zero"""
        assert relative_error(np.ones(3), np.ones(3)) == 0.0
        assert relative_error(np.zeros(3), np.zeros(3)) == 0.0
        assert relative_error(np.array([1.0]), np.array([-1.0])) == 1.0
