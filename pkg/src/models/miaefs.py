"""MIAE with a feature-selection layer after z and an L2,1 penalty on its weights.

The feature-selection layer h = tanh(z @ W_f + b_f) sits between the
concatenated latent vector and the decoder. Rows of W_f that the penalty
drives toward zero mark latent features the decoder does not need, which
gives the importance ranking used for top-beta selection.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import Config
from ..errors import ConfigurationError, InvalidDimensionError
from ..numerics.linalg import as_matrix, mse
from ..numerics.rng import Rng
from .layers import Dense, LayerStack
from .miae import BranchInput, MiaeConfig, MiaeModel, branch_list, build_encoders
from .training import TrainData, TrainHyper, train

logger = logging.getLogger(__name__)


def round_half_up(value: float | Fraction) -> int:
    return int(math.floor(value + Fraction(1, 2)))


def bottleneck_width(d_x: int) -> int:
    """d_h = sqrt(d_x), rounded to nearest"""
    return max(1, round_half_up(math.sqrt(d_x)))


def l21_norm(W: np.ndarray, eps: float = Config.L21_EPS) -> float:
    """Sum over rows of sqrt(||row||^2 + eps)"""
    W = as_matrix(W, "W")
    return float(np.sum(np.sqrt(np.sum(W * W, axis=1) + eps)))


def l21_grad(W: np.ndarray, eps: float = Config.L21_EPS) -> np.ndarray:
    norms = np.sqrt(np.sum(W * W, axis=1, keepdims=True) + eps)
    return W / norms


@dataclass(frozen=True)
class FeatureRanking:
    scores: np.ndarray
    order: np.ndarray

    @property
    def d_z(self) -> int:
        return self.scores.shape[0]

    def ranks(self) -> np.ndarray:
        """Rank (0 = most important) of every feature index"""
        ranks = np.empty_like(self.order)
        ranks[self.order] = np.arange(self.order.shape[0])
        return ranks


class MiaefsModel(MiaeModel):
    """Encoders phi, feature-selection layer gamma = (W_f, b_f), decoder theta"""

    kind = "miaefs"

    def __init__(
        self,
        config: MiaeConfig,
        encoders: List[LayerStack],
        fs_layer: Dense,
        decoder: LayerStack,
        alpha: float,
    ):
        super().__init__(config, encoders, decoder)
        if fs_layer.fan_in != config.d_z or decoder.input_width != fs_layer.fan_out:
            raise InvalidDimensionError(
                f"feature-selection layer {fs_layer.W.shape} does not sit between "
                f"d_z={config.d_z} and decoder input {decoder.input_width}"
            )
        if alpha < 0:
            raise ConfigurationError(f"alpha must be non-negative, got {alpha}")
        self.fs_layer = fs_layer
        self.alpha = float(alpha)

    @property
    def d_h(self) -> int:
        return self.fs_layer.fan_out

    @property
    def W_f(self) -> np.ndarray:
        return self.fs_layer.W

    def fs_forward_batch(self, z: np.ndarray) -> np.ndarray:
        z = as_matrix(z, "z")
        if z.shape[1] != self.config.d_z:
            raise InvalidDimensionError(
                f"expected d_z={self.config.d_z} columns, got {z.shape[1]}"
            )
        return self.fs_layer.forward(z)

    def _from_latent(self, z: np.ndarray) -> np.ndarray:
        return self.decoder.forward(self.fs_forward_batch(z))

    def _latent_backward(self, d_xhat: np.ndarray) -> np.ndarray:
        return self.fs_layer.backward(self.decoder.backward(d_xhat))

    def decode_batch(self, z: np.ndarray) -> np.ndarray:
        """Full post-latent path: feature-selection layer then decoder"""
        return self._from_latent(as_matrix(z, "z"))

    def penalty(self) -> float:
        return self.alpha * l21_norm(self.fs_layer.W)

    def loss(self, x: BranchInput) -> float:
        return self.reconstruction_loss(x) + self.penalty()

    def forward_backward(self, x: BranchInput) -> float:
        loss = super().forward_backward(x) + self.penalty()
        if self.alpha:
            self.fs_layer.dW = self.fs_layer.dW + self.alpha * l21_grad(self.fs_layer.W)
        return loss

    def parameters(self) -> Dict[str, np.ndarray]:
        params = super().parameters()
        params.update({"fs.W": self.fs_layer.W, "fs.b": self.fs_layer.b})
        return params

    def gradients(self) -> Dict[str, np.ndarray]:
        grads = super().gradients()
        grads.update({"fs.W": self.fs_layer.dW, "fs.b": self.fs_layer.db})
        return grads


def build_fs(
    config: MiaeConfig, alpha: float = Config.DEFAULT_ALPHA, bottleneck: Optional[int] = None
) -> MiaefsModel:
    """Encoders as in MIAE, a d_z x d_h selection layer, decoder d_h -> d_z -> ... -> d_x"""
    if alpha < 0:
        raise ConfigurationError(f"alpha must be non-negative, got {alpha}")
    d_h = bottleneck if bottleneck is not None else bottleneck_width(config.d_x)
    if d_h < 1:
        raise InvalidDimensionError(f"bottleneck width must be >= 1, got {d_h}")
    rng = Rng(config.seed)
    encoders = build_encoders(config, rng)
    fs_layer = Dense.glorot(config.d_z, d_h, "tanh", rng)
    decoder = LayerStack.build(
        [d_h, config.d_z, *config.decoder_hidden, config.d_x], "tanh", "relu", rng
    )
    logger.info(
        f"Built MIAEFS: branches {config.branch_dims}, d_z={config.d_z}, d_h={d_h}, "
        f"alpha={alpha}"
    )
    return MiaefsModel(config, encoders, fs_layer, decoder, alpha)


def fs_forward(model: MiaefsModel, z: np.ndarray) -> np.ndarray:
    """h = tanh(z @ W_f + b_f) for one latent vector"""
    return model.fs_forward_batch(z)[0]


def loss_fs(model: MiaefsModel, batch: BranchInput) -> float:
    return model.loss(batch)


def train_fs(
    model: MiaefsModel, data: TrainData, hyper: TrainHyper
) -> Tuple[MiaefsModel, List[float]]:
    return train(model, data, hyper)


def importance_scores(model: MiaefsModel) -> FeatureRanking:
    """w_j = sum_k W_f[j, k]^2, ordered descending with ties by ascending index"""
    W = model.fs_layer.W
    scores = np.sum(W * W, axis=1)
    order = np.argsort(-scores, kind="stable")
    return FeatureRanking(scores=scores, order=order)


def top_k(beta: float, d_z: int) -> int:
    """Number of retained features, max(1, round(beta * d_z))"""
    if not (0.0 < beta <= 1.0):
        raise ConfigurationError(f"beta must be in (0, 1], got {beta}")
    # beta as written (0.7, not 0.69999...) so exact halves round up
    return max(1, round_half_up(Fraction(repr(float(beta))) * d_z))


def select_top_k(z_rows: np.ndarray, ranking: FeatureRanking, k: int) -> np.ndarray:
    z_rows = as_matrix(z_rows, "z_rows")
    if z_rows.shape[1] != ranking.d_z:
        raise InvalidDimensionError(
            f"ranking covers {ranking.d_z} features, rows have {z_rows.shape[1]}"
        )
    if not 1 <= k <= ranking.d_z:
        raise InvalidDimensionError(f"k must be in [1, {ranking.d_z}], got {k}")
    return z_rows[:, ranking.order[:k]]


def select_features(z_rows: np.ndarray, ranking: FeatureRanking, beta: float) -> np.ndarray:
    """The top beta * d_z columns of z, in ranked order"""
    return select_top_k(z_rows, ranking, top_k(beta, ranking.d_z))


def mask_latent(z_rows: np.ndarray, ranking: FeatureRanking, beta: float) -> np.ndarray:
    """Copy of z with every coordinate outside the top-k set set to zero"""
    z_rows = as_matrix(z_rows, "z_rows")
    k = top_k(beta, ranking.d_z)
    masked = np.zeros_like(z_rows)
    keep = ranking.order[:k]
    masked[:, keep] = z_rows[:, keep]
    return masked


def reconstruct_masked_batch(
    model: MiaefsModel, z_rows: np.ndarray, ranking: FeatureRanking, beta: float
) -> np.ndarray:
    return model.decode_batch(mask_latent(z_rows, ranking, beta))


def reconstruct_masked(
    model: MiaefsModel, z: np.ndarray, ranking: FeatureRanking, beta: float
) -> np.ndarray:
    return reconstruct_masked_batch(model, z, ranking, beta)[0]


def masked_reconstruction_error(
    model: MiaefsModel, x: BranchInput, ranking: FeatureRanking, beta: float
) -> float:
    """Batch MSE between inputs and their masked reconstructions"""
    branches = branch_list(x)
    target = np.concatenate(branches, axis=1)
    z = model.encode_batch(branches)
    return mse(target, reconstruct_masked_batch(model, z, ranking, beta))
