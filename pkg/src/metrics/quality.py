"""Between-class / within-class separability of a representation."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import InvalidDimensionError, UndefinedMetricError


@dataclass(frozen=True)
class QualityReport:
    d_bet: float
    d_wit: float
    data_quality: Optional[float]
    class_means: np.ndarray
    d_z: int
    class_counts: List[int]


def _check(Z: np.ndarray, y: np.ndarray):
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if Z.ndim != 2 or Z.shape[0] == 0 or Z.shape[1] == 0:
        raise InvalidDimensionError(f"expected a non-empty matrix, got shape {Z.shape}")
    if y.shape != (Z.shape[0],):
        raise InvalidDimensionError(f"{y.shape[0]} labels for {Z.shape[0]} rows")
    return Z, y


def class_means(Z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row c is the mean of the rows labelled c"""
    Z, y = _check(Z, y)
    n_classes = int(y.max()) + 1
    counts = np.bincount(y, minlength=n_classes)
    if np.any(counts == 0):
        missing = np.flatnonzero(counts == 0).tolist()
        raise InvalidDimensionError(f"class(es) {missing} have no rows")
    sums = np.zeros((n_classes, Z.shape[1]))
    np.add.at(sums, y, Z)
    return sums / counts[:, None]


def quality(Z: np.ndarray, y: np.ndarray) -> QualityReport:
    """d_bet over all ordered class pairs, d_wit over all rows, and their ratio.

    Raises:
        UndefinedMetricError: d_wit is zero; ``report`` holds d_bet and d_wit
    """
    Z, y = _check(Z, y)
    means = class_means(Z, y)
    if means.shape[0] < 2:
        raise InvalidDimensionError("quality needs at least two classes")
    n, d_z = Z.shape

    pairwise = means[:, None, :] - means[None, :, :]
    d_bet = float(np.sum(pairwise**2) / (d_z * 2))
    d_wit = float(np.sum((Z - means[y]) ** 2) / (d_z * n))

    report = QualityReport(
        d_bet=d_bet,
        d_wit=d_wit,
        data_quality=d_bet / d_wit if d_wit > 0 else None,
        class_means=means,
        d_z=d_z,
        class_counts=np.bincount(y).tolist(),
    )
    if d_wit == 0:
        raise UndefinedMetricError("data quality undefined: d_wit is zero", report=report)
    return report
