"""Min-max scaling fitted on the training split and reused for test data."""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidDimensionError
from .tabular import TabularDataset


@dataclass(frozen=True)
class NormalizationStats:
    minimum: np.ndarray
    maximum: np.ndarray

    @property
    def width(self) -> int:
        return self.minimum.shape[0]

    def to_dict(self) -> dict:
        return {"min": self.minimum.tolist(), "max": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationStats":
        return cls(
            minimum=np.asarray(data["min"], dtype=np.float64),
            maximum=np.asarray(data["max"], dtype=np.float64),
        )


def fit_minmax(train: TabularDataset) -> NormalizationStats:
    if train.n_samples == 0:
        raise InvalidDimensionError("cannot fit min-max statistics on no rows")
    return NormalizationStats(
        minimum=train.features.min(axis=0), maximum=train.features.max(axis=0)
    )


def scale_matrix(features: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    """(v - min) / (max - min) clamped to [0, 1]; constant columns map to 0"""
    if features.shape[1] != stats.width:
        raise InvalidDimensionError(
            f"dataset has {features.shape[1]} columns, statistics cover {stats.width}"
        )
    span = stats.maximum - stats.minimum
    constant = span == 0.0
    safe_span = np.where(constant, 1.0, span)
    scaled = (features - stats.minimum) / safe_span
    scaled[:, constant] = 0.0
    return np.clip(scaled, 0.0, 1.0)


def apply_minmax(ds: TabularDataset, stats: NormalizationStats) -> TabularDataset:
    return ds.with_features(scale_matrix(ds.features, stats))
