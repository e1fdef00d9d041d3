"""Single-input auto-encoder trained on reconstruction error alone."""

from typing import Dict, Sequence

import numpy as np

from ..errors import InvalidDimensionError
from ..numerics.linalg import mse, mse_grad
from ..numerics.rng import Rng
from .layers import LayerStack


class AutoEncoder:
    """Encoder f(x, phi) and decoder g(z, theta) over one input matrix"""

    kind = "ae"

    def __init__(self, encoder: LayerStack, decoder: LayerStack):
        if encoder.output_width != decoder.input_width:
            raise InvalidDimensionError("encoder output must feed the decoder")
        if encoder.input_width != decoder.output_width:
            raise InvalidDimensionError("decoder must reproduce the input width")
        self.encoder = encoder
        self.decoder = decoder

    @classmethod
    def build(
        cls, input_dim: int, hidden: Sequence[int], latent_dim: int, seed: int = 0
    ) -> "AutoEncoder":
        """Encoder widths input->hidden->latent, decoder mirrors them"""
        rng = Rng(seed)
        encoder = LayerStack.build([input_dim, *hidden, latent_dim], "tanh", "tanh", rng)
        decoder = LayerStack.build(
            [latent_dim, *reversed(hidden), input_dim], "tanh", "relu", rng
        )
        return cls(encoder, decoder)

    def encode_batch(self, x: np.ndarray) -> np.ndarray:
        return self.encoder.forward(np.atleast_2d(x))

    def reconstruct_batch(self, x: np.ndarray) -> np.ndarray:
        return self.decoder.forward(self.encode_batch(x))

    def loss(self, x: np.ndarray) -> float:
        return mse(x, self.reconstruct_batch(x))

    def forward_backward(self, x: np.ndarray) -> float:
        if x.shape[0] == 0:
            raise InvalidDimensionError("loss of an empty batch is undefined")
        xhat = self.reconstruct_batch(x)
        loss = mse(x, xhat)
        self.encoder.backward(self.decoder.backward(mse_grad(xhat, x)))
        return loss

    def parameters(self) -> Dict[str, np.ndarray]:
        return {**self.encoder.parameters("encoder.0"), **self.decoder.parameters("decoder")}

    def gradients(self) -> Dict[str, np.ndarray]:
        return {**self.encoder.gradients("encoder.0"), **self.decoder.gradients("decoder")}
