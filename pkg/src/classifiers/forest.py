"""Bootstrap-aggregated CART forest with per-split feature subsampling."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from joblib import Parallel, delayed

from ..config import Config
from ..errors import ConfigurationError
from ..numerics.rng import Rng
from .tree import DecisionTree, check_features, check_training_data, dt_fit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RandomForest:
    trees: List[DecisionTree]
    n_estimators: int
    max_features: int
    seed: int
    n_features: int
    n_classes: int

    def votes(self, X: np.ndarray) -> np.ndarray:
        X = check_features(X, self.n_features)
        counts = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            counts[rows, tree.predict(X)] += 1
        return counts

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Majority vote, ties to the smaller class index"""
        return np.argmax(self.votes(X), axis=1)


def _fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    max_depth: Optional[int],
    max_features: int,
    rng: Rng,
) -> DecisionTree:
    n = X.shape[0]
    sample = rng.integers(0, n, n)
    return dt_fit(
        X[sample], y[sample], max_depth, rng, max_features=max_features, n_classes=n_classes
    )


def rf_fit(
    X: np.ndarray,
    y: np.ndarray,
    n_estimators: int,
    max_depth: Optional[int] = None,
    rng: Optional[Rng] = None,
    max_features: Optional[int] = None,
    n_classes: Optional[int] = None,
    n_jobs: int = Config.N_JOBS,
) -> RandomForest:
    """Tree i is grown from ``rng.spawn(i)``, so results do not depend on ``n_jobs``"""
    X, y = check_training_data(X, y)
    if n_estimators < 1:
        raise ConfigurationError(f"n_estimators must be >= 1, got {n_estimators}")
    rng = rng or Rng(0)
    d = X.shape[1]
    max_features = max_features or math.ceil(math.sqrt(d))
    n_classes = max(int(y.max()) + 1, n_classes or 0)

    trees = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_fit_tree)(X, y, n_classes, max_depth, max_features, rng.spawn(i))
        for i in range(n_estimators)
    )
    logger.debug(
        f"Fitted forest of {n_estimators} trees, max depth "
        f"{max(t.depth for t in trees)}"
    )
    return RandomForest(
        trees=list(trees),
        n_estimators=n_estimators,
        max_features=max_features,
        seed=rng.seed,
        n_features=d,
        n_classes=n_classes,
    )


Classifier = Union[DecisionTree, RandomForest]


def predict(model: Classifier, X: np.ndarray) -> np.ndarray:
    return model.predict(X)
