"""Labeled tabular datasets: CSV ingest and export."""

import logging
import os
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np
import pandas as pd

from ..config import Config
from ..errors import IngestionError, InvalidDimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TabularDataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: List[str]
    class_names: List[str]
    label_column: str = "label"

    def __post_init__(self):
        if self.features.ndim != 2:
            raise InvalidDimensionError("features must be a 2-D matrix")
        if len(self.labels) != self.features.shape[0]:
            raise InvalidDimensionError(
                f"{len(self.labels)} labels for {self.features.shape[0]} rows"
            )
        if len(self.feature_names) != self.features.shape[1]:
            raise InvalidDimensionError(
                f"{len(self.feature_names)} names for {self.features.shape[1]} columns"
            )
        if len(self.labels) and (
            self.labels.min() < 0 or self.labels.max() >= len(self.class_names)
        ):
            raise InvalidDimensionError("label index outside the known classes")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def with_features(
        self, features: np.ndarray, feature_names: Sequence[str] | None = None
    ) -> "TabularDataset":
        """Same rows and labels, different feature matrix"""
        names = list(feature_names) if feature_names is not None else None
        if names is None:
            names = (
                self.feature_names
                if features.shape[1] == self.n_features
                else [f"f{i}" for i in range(features.shape[1])]
            )
        return replace(self, features=features, feature_names=names)

    def label_strings(self) -> List[str]:
        return [self.class_names[i] for i in self.labels]


def encode_labels(raw: Sequence[str]) -> tuple[np.ndarray, List[str]]:
    """Dense class indices in first-appearance order"""
    class_names: List[str] = []
    index = {}
    labels = np.empty(len(raw), dtype=np.int64)
    for i, value in enumerate(raw):
        if value not in index:
            index[value] = len(class_names)
            class_names.append(value)
        labels[i] = index[value]
    return labels, class_names


def load_csv(path: str, label_column: str) -> TabularDataset:
    """Read a header-first CSV with one label column and numeric features"""
    if not os.path.exists(path):
        raise IngestionError(f"file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise IngestionError(f"empty file: {path}", line=1) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise IngestionError(f"unreadable CSV {path}: {e}") from None

    if frame.shape[0] == 0:
        raise IngestionError(f"no data rows in {path}", line=2)
    if label_column not in frame.columns:
        raise IngestionError(f"label column missing from {path}", column=label_column)

    feature_names = [c for c in frame.columns if c != label_column]
    if not feature_names:
        raise IngestionError(f"no feature columns in {path}")

    features = np.empty((frame.shape[0], len(feature_names)), dtype=np.float64)
    for j, name in enumerate(feature_names):
        column = frame[name].str.strip()
        values = pd.to_numeric(column, errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            # header is line 1
            raise IngestionError(
                f"non-numeric value '{frame[name].iloc[row]}' in {path}",
                line=row + 2,
                column=name,
            )
        features[:, j] = values

    labels, class_names = encode_labels(frame[label_column].str.strip().tolist())
    logger.info(
        f"Loaded {path}: {features.shape[0]} rows, {features.shape[1]} features, "
        f"{len(class_names)} classes"
    )
    return TabularDataset(
        features=features,
        labels=labels,
        feature_names=feature_names,
        class_names=class_names,
        label_column=label_column,
    )


def write_csv(ds: TabularDataset, path: str) -> str:
    """Write features plus the label column, floats at full precision"""
    frame = pd.DataFrame(ds.features, columns=ds.feature_names)
    frame[ds.label_column] = ds.label_strings()
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, float_format=Config.CSV_FLOAT_FORMAT)
    return path


def align_labels(train: TabularDataset, other: TabularDataset) -> TabularDataset:
    """Re-index ``other``'s labels onto ``train``'s class list.

    Classes that only appear in ``other`` are appended after the training
    classes, in their first-appearance order.
    """
    class_names = list(train.class_names)
    index = {name: i for i, name in enumerate(class_names)}
    labels = np.empty(other.n_samples, dtype=np.int64)
    for i, name in enumerate(other.label_strings()):
        if name not in index:
            index[name] = len(class_names)
            class_names.append(name)
        labels[i] = index[name]
    return replace(other, labels=labels, class_names=class_names)
