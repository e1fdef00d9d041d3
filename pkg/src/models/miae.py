"""Multiple-input auto-encoder: parallel sub-encoders, one shared decoder."""

import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..data.partition import BranchView
from ..errors import InvalidDimensionError
from ..numerics.linalg import mse, mse_grad
from ..numerics.rng import Rng
from .layers import LayerStack

logger = logging.getLogger(__name__)

BranchInput = Union[BranchView, Sequence[np.ndarray]]


def mirrored_sums(branch_hidden: Sequence[Sequence[int]]) -> List[int]:
    """Decoder hidden widths: per-level sums over branches, deepest level first"""
    depth = len(branch_hidden[0])
    sums = [sum(h[level] for h in branch_hidden) for level in range(depth)]
    return list(reversed(sums))


class MiaeConfig(BaseModel):
    """Architecture of a multiple-input auto-encoder"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    branch_dims: List[int] = Field(..., min_length=1, description="Input width d_j per branch")
    branch_hidden: List[List[int]] = Field(
        default_factory=list,
        description="Hidden widths of each sub-encoder, latent layer excluded",
    )
    z_per_branch: int = Field(..., ge=1, description="Latent width of each sub-encoder")
    decoder_hidden: Optional[List[int]] = Field(
        None, description="Decoder hidden widths; derived from the encoders when omitted"
    )
    seed: int = Field(0, ge=0, description="Weight initialization seed")

    @model_validator(mode="before")
    @classmethod
    def fill_derived_widths(cls, data):
        """A flat hidden list applies to every branch; the decoder mirrors the encoders"""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        dims = data.get("branch_dims") or []
        hidden = data.get("branch_hidden")
        if not hidden:
            hidden = [[] for _ in dims]
        elif all(isinstance(h, int) for h in hidden):
            hidden = [list(hidden) for _ in dims]
        data["branch_hidden"] = hidden
        if data.get("decoder_hidden") is None and hidden and all(
            isinstance(h, (list, tuple)) and len(h) == len(hidden[0]) for h in hidden
        ):
            data["decoder_hidden"] = mirrored_sums(hidden)
        return data

    @model_validator(mode="after")
    def check_symmetry(self):
        if any(d < 1 for d in self.branch_dims):
            raise ValueError(f"branch widths must be >= 1, got {self.branch_dims}")
        if len(self.branch_hidden) != len(self.branch_dims):
            raise ValueError(
                f"{len(self.branch_hidden)} hidden specs for {len(self.branch_dims)} branches"
            )
        if len({len(h) for h in self.branch_hidden}) != 1:
            raise ValueError("every sub-encoder needs the same number of hidden layers")
        if any(w < 1 for h in self.branch_hidden for w in h):
            raise ValueError("hidden widths must be >= 1")
        expected = mirrored_sums(self.branch_hidden)
        if list(self.decoder_hidden or []) != expected:
            raise ValueError(
                f"decoder hidden widths {self.decoder_hidden} are not symmetric "
                f"to the encoders (expected {expected})"
            )
        return self

    @property
    def n_branches(self) -> int:
        return len(self.branch_dims)

    @property
    def d_z(self) -> int:
        return self.n_branches * self.z_per_branch

    @property
    def d_x(self) -> int:
        return sum(self.branch_dims)


def branch_list(x: BranchInput) -> List[np.ndarray]:
    """Branch matrices of a view, promoting single rows to 1-row matrices"""
    branches = x.branches if isinstance(x, BranchView) else list(x)
    return [np.atleast_2d(np.asarray(b, dtype=np.float64)) for b in branches]


class MiaeModel:
    """Sub-encoder stacks phi_j and decoder theta of a multiple-input auto-encoder"""

    kind = "miae"

    def __init__(self, config: MiaeConfig, encoders: List[LayerStack], decoder: LayerStack):
        if len(encoders) != config.n_branches:
            raise InvalidDimensionError(
                f"{len(encoders)} encoders for {config.n_branches} branches"
            )
        self.config = config
        self.encoders = encoders
        self.decoder = decoder

    # -- forward -----------------------------------------------------------

    def encode_batch(self, x: BranchInput) -> np.ndarray:
        branches = branch_list(x)
        if len(branches) != self.config.n_branches:
            raise InvalidDimensionError(
                f"model has {self.config.n_branches} branches, input has {len(branches)}"
            )
        for j, (branch, width) in enumerate(zip(branches, self.config.branch_dims)):
            if branch.shape[1] != width:
                raise InvalidDimensionError(
                    f"branch {j} expects {width} columns, got {branch.shape[1]}"
                )
        codes = [enc.forward(b) for enc, b in zip(self.encoders, branches)]
        return np.concatenate(codes, axis=1)

    def encode(self, x_row: BranchInput) -> np.ndarray:
        """Latent vector z = e_1 + ... + e_n (concatenated) for a single row"""
        z = self.encode_batch(x_row)
        if z.shape[0] != 1:
            raise InvalidDimensionError(f"encode takes one row, got {z.shape[0]}")
        return z[0]

    def decode_batch(self, z: np.ndarray) -> np.ndarray:
        return self.decoder.forward(np.atleast_2d(np.asarray(z, dtype=np.float64)))

    def decode(self, z: np.ndarray) -> np.ndarray:
        return self.decode_batch(z)[0]

    def _from_latent(self, z: np.ndarray) -> np.ndarray:
        return self.decoder.forward(z)

    def reconstruct_batch(self, x: BranchInput) -> np.ndarray:
        return self._from_latent(self.encode_batch(x))

    # -- loss and gradients --------------------------------------------------

    def reconstruction_loss(self, x: BranchInput) -> float:
        branches = branch_list(x)
        if branches[0].shape[0] == 0:
            raise InvalidDimensionError("loss of an empty batch is undefined")
        target = np.concatenate(branches, axis=1)
        return mse(target, self.reconstruct_batch(branches))

    def loss(self, x: BranchInput) -> float:
        return self.reconstruction_loss(x)

    def _latent_backward(self, d_xhat: np.ndarray) -> np.ndarray:
        return self.decoder.backward(d_xhat)

    def forward_backward(self, x: BranchInput) -> float:
        """Loss on the batch; leaves gradients of every parameter on the layers"""
        branches = branch_list(x)
        if branches[0].shape[0] == 0:
            raise InvalidDimensionError("loss of an empty batch is undefined")
        target = np.concatenate(branches, axis=1)
        xhat = self._from_latent(self.encode_batch(branches))
        loss = mse(target, xhat)
        d_z = self._latent_backward(mse_grad(xhat, target))
        start = 0
        for encoder in self.encoders:
            stop = start + encoder.output_width
            encoder.backward(d_z[:, start:stop])
            start = stop
        return loss

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {}
        for j, encoder in enumerate(self.encoders):
            params.update(encoder.parameters(f"encoder.{j}"))
        params.update(self.decoder.parameters("decoder"))
        return params

    def gradients(self) -> Dict[str, np.ndarray]:
        grads = {}
        for j, encoder in enumerate(self.encoders):
            grads.update(encoder.gradients(f"encoder.{j}"))
        grads.update(self.decoder.gradients("decoder"))
        return grads


def build_encoders(config: MiaeConfig, rng: Rng) -> List[LayerStack]:
    return [
        LayerStack.build([dim, *hidden, config.z_per_branch], "tanh", "tanh", rng)
        for dim, hidden in zip(config.branch_dims, config.branch_hidden)
    ]


def build(config: MiaeConfig) -> MiaeModel:
    """Glorot weights and zero biases, drawn from ``Rng(config.seed)``"""
    rng = Rng(config.seed)
    encoders = build_encoders(config, rng)
    decoder = LayerStack.build(
        [config.d_z, *config.decoder_hidden, config.d_x], "tanh", "relu", rng
    )
    logger.info(
        f"Built MIAE: branches {config.branch_dims}, d_z={config.d_z}, "
        f"decoder {decoder.widths}"
    )
    return MiaeModel(config, encoders, decoder)
