#!/usr/bin/env python3
"""
Test suite for holdout grid search
"""

import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

# Add the project root to path so we can import our modules
sys.path.append(os.path.join(os.path.dirname(__file__), ".."))  # noqa

from src.classifiers import GridSearchSpec, grid_search  # noqa
from src.classifiers.forest import RandomForest  # noqa
from src.classifiers.grid_search import stratified_holdout  # noqa
from src.classifiers.tree import DecisionTree  # noqa
from src.errors import ConfigurationError, StratificationError  # noqa
from src.numerics import Rng  # noqa


@pytest.fixture
def nested_data():
    """Four classes laid out so that depth 0 and 1 underfit and depth 2 is exact"""
    rng = Rng(5)
    u = rng.uniform(0, 1, (200, 2))
    y = (u[:, 0] > 0.5).astype(int) * 2 + (u[:, 1] > 0.5).astype(int)
    # open a gap around 0.5 so every threshold inside it is exact
    X = 0.9 * u + 0.1 * (u > 0.5)
    return X, y


class TestGridSearchSpec:
    """Test suite for GridSearchSpec validation"""

    def test_defaults(self):
        """Test defaults: random forest over the usual tree counts, accuracy, 0.2 holdout"""
        spec = GridSearchSpec()
        assert spec.family == "rf"
        assert spec.metric == "accuracy"
        assert spec.validation_fraction == 0.2
        assert [c["n_estimators"] for c in spec.candidates()] == [5, 10, 20, 50, 100, 150]

    def test_dt_default_grid(self):
        """Test the decision tree grid defaults to the usual depths"""
        spec = GridSearchSpec(family="dt")
        assert [c["max_depth"] for c in spec.candidates()] == [5, 10, 20, 50, 100]

    def test_empty_candidate_list_rejected(self):
        """Test empty candidate lists are invalid"""
        with pytest.raises(ValidationError):
            GridSearchSpec(grid={"n_estimators": []})
        with pytest.raises(ValidationError):
            GridSearchSpec(grid={})

    def test_cartesian_product_order(self):
        """Test candidates follow grid order, last key fastest"""
        spec = GridSearchSpec(grid={"n_estimators": [5, 10], "max_depth": [2, 4]})
        assert spec.candidates() == [
            {"n_estimators": 5, "max_depth": 2},
            {"n_estimators": 5, "max_depth": 4},
            {"n_estimators": 10, "max_depth": 2},
            {"n_estimators": 10, "max_depth": 4},
        ]


class TestStratifiedHoldout:
    """Test suite for the validation split"""

    def test_per_class_share(self):
        """Test each class contributes round(0.2 * n_c) validation rows"""
        y = np.array([0] * 10 + [1] * 5)
        train_idx, val_idx = stratified_holdout(y, 0.2, Rng(0))
        assert np.bincount(y[val_idx]).tolist() == [2, 1]
        assert sorted(np.concatenate([train_idx, val_idx]).tolist()) == list(range(15))

    def test_class_lost_from_training(self):
        """Test a class that would vanish from training raises"""
        y = np.array([0, 0, 0, 0, 1])
        with pytest.raises(StratificationError):
            stratified_holdout(y, 0.5, Rng(0))

    def test_seed_deterministic(self):
        """Test the split depends only on the seed"""
        y = np.arange(40) % 3
        a = stratified_holdout(y, 0.2, Rng(4))
        b = stratified_holdout(y, 0.2, Rng(4))
        assert np.array_equal(a[1], b[1])


class TestGridSearch:
    """Test suite for grid_search"""

    def test_single_candidate_returned(self, nested_data):
        """Test one candidate is refitted without validation"""
        X, y = nested_data
        spec = GridSearchSpec(family="dt", grid={"max_depth": [3]})
        result = grid_search(spec, X, y)
        assert result.best_params == {"max_depth": 3}
        assert result.scores == []
        assert isinstance(result.model, DecisionTree)

    def test_dominant_candidate_selected(self, nested_data):
        """Test the only depth that separates all four classes wins"""
        X, y = nested_data
        spec = GridSearchSpec(family="dt", grid={"max_depth": [0, 1, 2]})
        result = grid_search(spec, X, y)
        assert result.best_params == {"max_depth": 2}
        assert result.best_score == 1.0
        assert [score for _, score in result.scores][2] == 1.0

    def test_ties_go_to_first_candidate(self, nested_data):
        """Test equally perfect candidates resolve to the earliest"""
        X, y = nested_data
        spec = GridSearchSpec(family="dt", grid={"max_depth": [2, 3, 4]})
        assert grid_search(spec, X, y).best_params == {"max_depth": 2}

    def test_refit_on_all_rows(self, nested_data):
        """Test the returned forest was fitted on the full training data"""
        X, y = nested_data
        spec = GridSearchSpec(grid={"n_estimators": [3, 5]}, fixed={"max_depth": 4})
        result = grid_search(spec, X, y)
        assert isinstance(result.model, RandomForest)
        assert result.model.n_estimators == result.best_params["n_estimators"]

    def test_unknown_parameter(self, nested_data):
        """Test a parameter the family does not take raises"""
        X, y = nested_data
        spec = GridSearchSpec(family="dt", grid={"n_estimators": [5, 10]})
        with pytest.raises(ConfigurationError):
            grid_search(spec, X, y)

    def test_deterministic(self, nested_data):
        """Test repeated searches agree score for score"""
        X, y = nested_data
        spec = GridSearchSpec(grid={"n_estimators": [2, 4]}, seed=3)
        assert grid_search(spec, X, y).scores == grid_search(spec, X, y).scores

    def test_fscore_metric(self, nested_data):
        """Test the selection metric can be macro F-score"""
        X, y = nested_data
        spec = GridSearchSpec(family="dt", grid={"max_depth": [1, 2]}, metric="fscore")
        assert grid_search(spec, X, y).best_params == {"max_depth": 2}
