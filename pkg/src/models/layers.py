"""Fully connected layers with cached forward passes for backpropagation."""

from typing import Dict, List, Optional, Sequence

import numpy as np

from ..errors import InvalidDimensionError
from ..numerics.linalg import (
    Activation,
    activate,
    activation_grad,
    affine_forward,
    glorot_init,
)
from ..numerics.rng import Rng


class Dense:
    """y = act(x @ W + b), W is fan_in x fan_out, b has fan_out entries"""

    def __init__(self, W: np.ndarray, b: np.ndarray, activation: Activation):
        self.W = np.ascontiguousarray(W, dtype=np.float64)
        self.b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1)
        self.activation = activation
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x: Optional[np.ndarray] = None
        self._pre: Optional[np.ndarray] = None
        self._out: Optional[np.ndarray] = None

    @classmethod
    def glorot(
        cls, fan_in: int, fan_out: int, activation: Activation, rng: Rng
    ) -> "Dense":
        return cls(glorot_init(fan_in, fan_out, rng), np.zeros(fan_out), activation)

    @property
    def fan_in(self) -> int:
        return self.W.shape[0]

    @property
    def fan_out(self) -> int:
        return self.W.shape[1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        pre = affine_forward(x, self.W, self.b)
        out = activate(pre, self.activation)
        self._x, self._pre, self._out = x, pre, out
        return out

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        if self._x is None:
            raise RuntimeError("backward called before forward")
        d_pre = d_out * activation_grad(self._pre, self._out, self.activation)
        self.dW = self._x.T @ d_pre
        self.db = d_pre.sum(axis=0)
        return d_pre @ self.W.T

    def parameters(self) -> Dict[str, np.ndarray]:
        return {"W": self.W, "b": self.b}

    def gradients(self) -> Dict[str, np.ndarray]:
        return {"W": self.dW, "b": self.db}


class LayerStack:
    """Sequential Dense layers"""

    def __init__(self, layers: List[Dense]):
        if not layers:
            raise InvalidDimensionError("a layer stack needs at least one layer")
        for upper, lower in zip(layers, layers[1:]):
            if upper.fan_out != lower.fan_in:
                raise InvalidDimensionError(
                    f"layer widths do not chain: {upper.fan_out} -> {lower.fan_in}"
                )
        self.layers = layers

    @classmethod
    def build(
        cls,
        widths: Sequence[int],
        hidden_activation: Activation,
        output_activation: Activation,
        rng: Rng,
    ) -> "LayerStack":
        """One layer per consecutive pair of ``widths``, drawn from ``rng`` in order"""
        if len(widths) < 2:
            raise InvalidDimensionError(f"need at least two widths, got {widths}")
        layers = []
        for i, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
            last = i == len(widths) - 2
            activation = output_activation if last else hidden_activation
            layers.append(Dense.glorot(fan_in, fan_out, activation, rng))
        return cls(layers)

    @property
    def input_width(self) -> int:
        return self.layers[0].fan_in

    @property
    def output_width(self) -> int:
        return self.layers[-1].fan_out

    @property
    def widths(self) -> List[int]:
        return [self.input_width] + [layer.fan_out for layer in self.layers]

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.input_width:
            raise InvalidDimensionError(
                f"expected {self.input_width} input columns, got shape {x.shape}"
            )
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            d_out = layer.backward(d_out)
        return d_out

    def parameters(self, prefix: str) -> Dict[str, np.ndarray]:
        params = {}
        for i, layer in enumerate(self.layers):
            for name, value in layer.parameters().items():
                params[f"{prefix}.{i}.{name}"] = value
        return params

    def gradients(self, prefix: str) -> Dict[str, np.ndarray]:
        grads = {}
        for i, layer in enumerate(self.layers):
            for name, value in layer.gradients().items():
                grads[f"{prefix}.{i}.{name}"] = value
        return grads
