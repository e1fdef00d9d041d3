"""Dense float64 kernels: initialization, affine maps, activations, loss."""

import math
from typing import Literal

import numpy as np

from ..errors import InvalidDimensionError
from .rng import Rng

Activation = Literal["tanh", "relu", "identity"]


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array"""
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2:
        raise InvalidDimensionError(f"{name} must be 2-D, got shape {array.shape}")
    return array


def glorot_init(fan_in: int, fan_out: int, rng: Rng) -> np.ndarray:
    """Uniform Glorot weights in [-L, L], L = sqrt(6 / (fan_in + fan_out))"""
    if fan_in < 1 or fan_out < 1:
        raise InvalidDimensionError(
            f"fan_in and fan_out must be >= 1, got {fan_in}x{fan_out}"
        )
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, (fan_in, fan_out))


def affine_forward(x: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = as_matrix(x, "x")
    if W.ndim != 2 or x.shape[1] != W.shape[0]:
        raise InvalidDimensionError(
            f"cannot multiply {x.shape} input by {W.shape} weights"
        )
    bias = np.asarray(b, dtype=np.float64).reshape(-1)
    if bias.shape[0] != W.shape[1]:
        raise InvalidDimensionError(
            f"bias width {bias.shape[0]} does not match {W.shape[1]} outputs"
        )
    return x @ W + bias


def activate(x: np.ndarray, kind: Activation) -> np.ndarray:
    if kind == "tanh":
        return np.tanh(x)
    if kind == "relu":
        return np.maximum(x, 0.0)
    if kind == "identity":
        return np.array(x, dtype=np.float64, copy=True)
    raise ValueError(f"unknown activation '{kind}'")


def activation_grad(pre: np.ndarray, out: np.ndarray, kind: Activation) -> np.ndarray:
    """Derivative of the activation, from its input and output"""
    if kind == "tanh":
        return 1.0 - out * out
    if kind == "relu":
        return (pre > 0.0).astype(np.float64)
    if kind == "identity":
        return np.ones_like(pre)
    raise ValueError(f"unknown activation '{kind}'")


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean over rows of the per-row squared error, (1/m) * sum_i ||a_i - b_i||^2"""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise InvalidDimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.shape[0] == 0:
        raise InvalidDimensionError("mse of an empty batch is undefined")
    diff = a - b
    return float(np.sum(diff * diff) / a.shape[0])


def mse_grad(prediction: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Gradient of ``mse(prediction, target)`` with respect to the prediction"""
    return 2.0 * (prediction - target) / prediction.shape[0]
