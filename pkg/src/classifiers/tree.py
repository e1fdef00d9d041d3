"""CART decision tree with Gini splits at midpoints between distinct values."""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ConfigurationError, InvalidDimensionError
from ..numerics.rng import Rng


@dataclass(frozen=True)
class DecisionTree:
    """Flat node arrays; ``feature[i] == -1`` marks a leaf"""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_class: np.ndarray
    max_depth: Optional[int]
    depth: int
    n_features: int
    n_classes: int

    @property
    def node_count(self) -> int:
        return self.feature.shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = check_features(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            current = node[active]
            go_left = X[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
            active = active[self.feature[node[active]] >= 0]
        return self.leaf_class[node]


def check_features(X: np.ndarray, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise InvalidDimensionError(
            f"model was fitted on {n_features} features, got shape {X.shape}"
        )
    return X


def gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def majority(counts: np.ndarray) -> int:
    """Most frequent class, ties to the smaller index"""
    return int(np.argmax(counts))


def best_split(
    X: np.ndarray, y: np.ndarray, n_classes: int, features: Sequence[int]
) -> Optional[tuple[int, float, float]]:
    """Lowest weighted Gini split as (feature, threshold, impurity).

    Candidates are visited by ascending feature then ascending threshold and
    only a strictly lower impurity replaces the incumbent.
    """
    n = y.shape[0]
    parent = np.bincount(y, minlength=n_classes).astype(np.float64)
    best = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        values = X[order, f]
        boundaries = np.flatnonzero(values[:-1] < values[1:])
        if boundaries.size == 0:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y[order]] = 1.0
        left = np.cumsum(onehot, axis=0)[boundaries]
        right = parent - left
        n_left = (boundaries + 1).astype(np.float64)
        n_right = n - n_left
        gini_left = 1.0 - np.sum(left * left, axis=1) / (n_left * n_left)
        gini_right = 1.0 - np.sum(right * right, axis=1) / (n_right * n_right)
        weighted = (n_left * gini_left + n_right * gini_right) / n
        i = int(np.argmin(weighted))
        if best is None or weighted[i] < best[2]:
            lo, hi = values[boundaries[i]], values[boundaries[i] + 1]
            threshold = (lo + hi) / 2.0
            if not threshold < hi:
                threshold = lo
            best = (int(f), float(threshold), float(weighted[i]))
    return best


class _TreeBuilder:
    def __init__(
        self,
        X: np.ndarray,
        y: np.ndarray,
        n_classes: int,
        max_depth: Optional[int],
        max_features: Optional[int],
        min_samples_split: int,
        rng: Optional[Rng],
    ):
        self.X = X
        self.y = y
        self.n_classes = n_classes
        self.max_depth = max_depth
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.rng = rng
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.leaf_class: List[int] = []
        self.depth = 0

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_class.append(0)
        return len(self.feature) - 1

    def _candidates(self) -> Sequence[int]:
        d = self.X.shape[1]
        if self.max_features is None or self.max_features >= d:
            return range(d)
        return np.sort(self.rng.choice(d, self.max_features, replace=False))

    def grow(self, rows: np.ndarray, depth: int = 0) -> int:
        """Depth-first growth from an explicit stack; node ids follow pre-order"""
        root = -1
        # (rows, depth, parent node, is left child)
        stack = [(rows, depth, -1, False)]
        while stack:
            rows, depth, parent, is_left = stack.pop()
            node = self._new_node()
            if parent < 0:
                root = node
            elif is_left:
                self.left[parent] = node
            else:
                self.right[parent] = node

            y = self.y[rows]
            counts = np.bincount(y, minlength=self.n_classes)
            self.leaf_class[node] = majority(counts)
            self.depth = max(self.depth, depth)
            if (
                (self.max_depth is not None and depth >= self.max_depth)
                or np.count_nonzero(counts) <= 1
                or rows.shape[0] < self.min_samples_split
            ):
                continue

            split = best_split(self.X[rows], y, self.n_classes, self._candidates())
            if split is None:
                continue
            feature, threshold, _ = split
            go_left = self.X[rows, feature] <= threshold
            self.feature[node] = feature
            self.threshold[node] = threshold
            stack.append((rows[~go_left], depth + 1, node, False))
            stack.append((rows[go_left], depth + 1, node, True))
        return root

    def result(self) -> DecisionTree:
        return DecisionTree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            leaf_class=np.asarray(self.leaf_class, dtype=np.int64),
            max_depth=self.max_depth,
            depth=self.depth,
            n_features=self.X.shape[1],
            n_classes=self.n_classes,
        )


def check_training_data(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise InvalidDimensionError(f"training data must be non-empty 2-D, got {X.shape}")
    if y.shape[0] != X.shape[0]:
        raise InvalidDimensionError(f"{y.shape[0]} labels for {X.shape[0]} rows")
    if y.min() < 0:
        raise InvalidDimensionError("class indices must be non-negative")
    return X, y


def dt_fit(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: Optional[int] = None,
    rng: Optional[Rng] = None,
    max_features: Optional[int] = None,
    n_classes: Optional[int] = None,
    min_samples_split: int = 2,
) -> DecisionTree:
    """Greedy CART growth; ``max_depth=None`` grows until leaves are pure"""
    X, y = check_training_data(X, y)
    if max_depth is not None and max_depth < 0:
        raise ConfigurationError(f"max_depth must be >= 0, got {max_depth}")
    if max_features is not None and rng is None:
        raise ConfigurationError("feature subsampling needs an rng")
    n_classes = max(int(y.max()) + 1, n_classes or 0)
    builder = _TreeBuilder(
        X, y, n_classes, max_depth, max_features, min_samples_split, rng
    )
    builder.grow(np.arange(X.shape[0]), 0)
    return builder.result()
