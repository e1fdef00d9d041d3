"""Detection metrics computed from a confusion matrix."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..errors import InvalidDimensionError, UndefinedMetricError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed by (true class, predicted class)"""

    counts: np.ndarray
    class_names: List[str] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def names(self) -> List[str]:
        return self.class_names or [str(c) for c in range(self.n_classes)]


def confusion(
    y_true: np.ndarray,
    y_pred: np.ndarray,
    n_classes: int,
    class_names: Optional[List[str]] = None,
) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise InvalidDimensionError(
            f"label vectors differ: {y_true.shape} vs {y_pred.shape}"
        )
    for name, labels in (("true", y_true), ("predicted", y_pred)):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise InvalidDimensionError(
                f"{name} class index outside [0, {n_classes})"
            )
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts=counts, class_names=list(class_names or []))


def _require_rows(cm: ConfusionMatrix):
    if cm.total == 0:
        raise InvalidDimensionError("confusion matrix is empty")


def accuracy(cm: ConfusionMatrix) -> float:
    _require_rows(cm)
    return float(np.trace(cm.counts) / cm.total)


def per_class_f1(cm: ConfusionMatrix) -> np.ndarray:
    """One-vs-rest F1 per class; zero where precision + recall is zero"""
    _require_rows(cm)
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    predicted = counts.sum(axis=0)
    actual = counts.sum(axis=1)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    denom = precision + recall
    return np.divide(
        2 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0
    )


def fscore(cm: ConfusionMatrix) -> float:
    """Macro-averaged F1"""
    return float(per_class_f1(cm).mean())


def far_mdr(cm: ConfusionMatrix, normal_class: int) -> Tuple[float, float]:
    """False alarm rate and miss detection rate, normal vs every attack class.

    Raises:
        UndefinedMetricError: no normal rows (FAR) or no attack rows (MDR)
    """
    if not 0 <= normal_class < cm.n_classes:
        raise InvalidDimensionError(
            f"normal class {normal_class} outside [0, {cm.n_classes})"
        )
    counts = cm.counts
    tn = counts[normal_class, normal_class]
    fp = counts[normal_class].sum() - tn
    fn = counts[:, normal_class].sum() - tn
    tp = counts.sum() - tn - fp - fn
    if tn + fp == 0:
        raise UndefinedMetricError("FAR undefined: no normal samples")
    if tp + fn == 0:
        raise UndefinedMetricError("MDR undefined: no attack samples")
    return float(fp / (fp + tn)), float(fn / (fn + tp))
