"""Minibatch Adam training loop shared by every auto-encoder variant."""

import logging
from typing import List, Protocol, Sequence, Tuple, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import Config
from ..data.partition import BranchView
from ..errors import InvalidDimensionError, TrainingDivergedError
from ..numerics.optim import Adam
from ..numerics.rng import Rng

logger = logging.getLogger(__name__)

TrainData = Union[BranchView, Sequence[np.ndarray], np.ndarray]


class Trainable(Protocol):
    def forward_backward(self, batch) -> float: ...

    def parameters(self) -> dict: ...

    def gradients(self) -> dict: ...


M = TypeVar("M", bound=Trainable)


class TrainHyper(BaseModel):
    """Batch size, epochs and learning rate of one training run"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    batch_size: int = Field(Config.DEFAULT_BATCH_SIZE, ge=1, description="Rows per minibatch")
    epochs: int = Field(Config.DEFAULT_EPOCHS, ge=1, description="Full passes over the data")
    lr: float = Field(Config.DEFAULT_LR, gt=0, description="Adam learning rate")
    shuffle_seed: int = Field(0, ge=0, description="Seed of the per-epoch row shuffle")
    log_every: int = Field(Config.LOG_EVERY, ge=1, description="Epochs between progress logs")


def _n_rows(data: TrainData) -> int:
    return data.n_samples if isinstance(data, BranchView) else data.shape[0]


def _take(data: TrainData, index: np.ndarray) -> TrainData:
    return data.rows(index) if isinstance(data, BranchView) else data[index]


def train(model: M, data: TrainData, hyper: TrainHyper) -> Tuple[M, List[float]]:
    """Fit ``model`` in place; returns it with the per-epoch loss history.

    Each epoch's loss is the batch-size-weighted mean of its batch losses.
    When one batch holds every row the order is left untouched, so the
    history does not depend on the shuffle seed.
    """
    if isinstance(data, (list, tuple)):
        data = BranchView(branches=list(data))
    n = _n_rows(data)
    if n == 0:
        raise InvalidDimensionError("cannot train on an empty dataset")

    rng = Rng(hyper.shuffle_seed)
    optimizer = Adam(hyper.lr)
    full_batch = hyper.batch_size >= n
    history: List[float] = []

    for epoch in range(1, hyper.epochs + 1):
        order = np.arange(n) if full_batch else rng.permutation(n)
        total = 0.0
        for batch_no, start in enumerate(range(0, n, hyper.batch_size), start=1):
            index = order[start : start + hyper.batch_size]
            loss = model.forward_backward(_take(data, index))
            if not np.isfinite(loss):
                logger.error(f"Training diverged at epoch {epoch}, batch {batch_no}")
                raise TrainingDivergedError(epoch, batch_no, loss)
            optimizer.step(model.parameters(), model.gradients())
            total += loss * len(index)
        history.append(total / n)

        if epoch % hyper.log_every == 0 or epoch == hyper.epochs:
            logger.info(f"Epoch {epoch}/{hyper.epochs} - loss {history[-1]:.6f}")

    return model, history
