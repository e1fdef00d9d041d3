"""Holdout grid search over decision-tree and random-forest hyperparameters."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..config import Config
from ..errors import ConfigurationError, StratificationError
from ..metrics.detection import accuracy, confusion, fscore
from ..numerics.rng import Rng
from .forest import Classifier, rf_fit
from .tree import dt_fit

logger = logging.getLogger(__name__)

Family = Literal["dt", "rf"]


def _fit_dt(X, y, n_classes, rng, max_depth=None, max_features=None, n_jobs=None):
    return dt_fit(X, y, max_depth, rng, max_features=max_features, n_classes=n_classes)


def _fit_rf(
    X, y, n_classes, rng, n_estimators=10, max_depth=None, max_features=None, n_jobs=Config.N_JOBS
):
    return rf_fit(
        X,
        y,
        n_estimators,
        max_depth,
        rng,
        max_features=max_features,
        n_classes=n_classes,
        n_jobs=n_jobs,
    )


FAMILIES: Dict[str, Tuple[Callable[..., Classifier], set]] = {
    "dt": (_fit_dt, {"max_depth", "max_features", "n_jobs"}),
    "rf": (_fit_rf, {"n_estimators", "max_depth", "max_features", "n_jobs"}),
}

SCORERS = {"accuracy": accuracy, "fscore": fscore}

DEFAULT_GRIDS = {
    "dt": {"max_depth": list(Config.DT_MAX_DEPTH_GRID)},
    "rf": {"n_estimators": list(Config.RF_N_ESTIMATORS_GRID)},
}


class GridSearchSpec(BaseModel):
    """Candidate hyperparameters and the validation protocol"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Family = Field("rf", description="Classifier family")
    grid: Optional[Dict[str, List[Optional[int]]]] = Field(
        None, description="Parameter name -> candidate values; family default when omitted"
    )
    fixed: Dict[str, Optional[int]] = Field(
        default_factory=dict, description="Parameters held constant across candidates"
    )
    metric: Literal["accuracy", "fscore"] = Field("accuracy", description="Selection metric")
    validation_fraction: float = Field(
        Config.VALIDATION_FRACTION, gt=0, lt=1, description="Held-out share per class"
    )
    seed: int = Field(0, ge=0, description="Split and fitting seed")

    @field_validator("grid")
    @classmethod
    def candidates_not_empty(cls, grid):
        if grid is None:
            return grid
        if not grid:
            raise ValueError("grid needs at least one parameter")
        for name, values in grid.items():
            if not values:
                raise ValueError(f"no candidates for '{name}'")
        return grid

    def candidates(self) -> List[Dict[str, Optional[int]]]:
        """Cartesian product in grid order"""
        grid = self.grid or DEFAULT_GRIDS[self.family]
        names = list(grid)
        return [
            dict(zip(names, values))
            for values in itertools.product(*(grid[n] for n in names))
        ]


@dataclass
class GridSearchResult:
    best_params: Dict[str, Optional[int]]
    best_score: float
    model: Classifier
    scores: List[Tuple[Dict[str, Optional[int]], float]] = field(default_factory=list)


def stratified_holdout(
    y: np.ndarray, fraction: float, rng: Rng
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-class shuffled holdout; each class keeps at least one training row"""
    train_parts, val_parts = [], []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(members.size)]
        n_val = int(np.floor(fraction * members.size + 0.5))
        if n_val >= members.size:
            raise StratificationError(
                f"class {int(c)} has {members.size} rows; none would remain for training"
            )
        val_parts.append(members[:n_val])
        train_parts.append(members[n_val:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(val_parts))


def fit_family(
    family: str, X: np.ndarray, y: np.ndarray, n_classes: int, seed: int, params: dict
) -> Classifier:
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown classifier family '{family}'")
    fit, allowed = FAMILIES[family]
    unknown = set(params) - allowed
    if unknown:
        raise ConfigurationError(
            f"{family} does not take parameter(s) {', '.join(sorted(unknown))}"
        )
    return fit(X, y, n_classes, Rng(seed).spawn(1), **params)


def grid_search(
    spec: GridSearchSpec,
    X: np.ndarray,
    y: np.ndarray,
    n_classes: Optional[int] = None,
) -> GridSearchResult:
    """Pick the candidate with the best validation score, then refit on all rows.

    Ties go to the earliest candidate in grid order.
    """
    family = spec.family
    y = np.asarray(y, dtype=np.int64)
    n_classes = max(int(y.max()) + 1, n_classes or 0)
    candidates = spec.candidates()
    scorer = SCORERS[spec.metric]
    scores: List[Tuple[dict, float]] = []

    if len(candidates) == 1:
        best = candidates[0]
        best_score = float("nan")
    else:
        train_idx, val_idx = stratified_holdout(
            y, spec.validation_fraction, Rng(spec.seed).spawn(0)
        )
        if val_idx.size == 0:
            raise StratificationError("validation split is empty")
        best, best_score = None, -np.inf
        for params in candidates:
            merged = {**spec.fixed, **params}
            model = fit_family(
                family, X[train_idx], y[train_idx], n_classes, spec.seed, merged
            )
            cm = confusion(y[val_idx], model.predict(X[val_idx]), n_classes)
            score = scorer(cm)
            scores.append((params, score))
            logger.info(f"Grid search {family} {params}: {spec.metric}={score:.4f}")
            if score > best_score:
                best, best_score = params, score

    model = fit_family(family, X, y, n_classes, spec.seed, {**spec.fixed, **best})
    logger.info(f"Grid search selected {family} {best}")
    return GridSearchResult(
        best_params=best, best_score=best_score, model=model, scores=scores
    )
