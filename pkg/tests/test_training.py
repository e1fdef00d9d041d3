#!/usr/bin/env python3
"""
Test suite for the minibatch training loop
"""

import logging
import os
import sys

import numpy as np
import pytest

# Add the project root to path so we can import our modules
sys.path.append(os.path.join(os.path.dirname(__file__), ".."))  # noqa

from src.data import BranchView  # noqa
from src.errors import InvalidDimensionError, TrainingDivergedError  # noqa
from src.models import MiaeConfig, TrainHyper, build, build_fs, train  # noqa
from src.numerics import Rng  # noqa


class TestTrain:
    """Test suite for train"""

    @pytest.fixture
    def data(self):
        """Fixture providing 60 rows with correlated branches"""
        base = Rng(4).uniform(0, 1, (60, 2))
        return BranchView(branches=[base, np.concatenate([base, base.mean(axis=1, keepdims=True)], axis=1)])

    @pytest.fixture
    def config(self):
        """Fixture providing a small two-branch architecture"""
        return MiaeConfig(branch_dims=[2, 3], branch_hidden=[[3], [3]], z_per_branch=1, seed=5)

    def test_history_has_one_entry_per_epoch(self, config, data):
        """Test the loss history length"""
        _, history = train(build(config), data, TrainHyper(batch_size=16, epochs=7, lr=0.01))
        assert len(history) == 7

    def test_loss_decreases(self, config, data):
        """Test training lowers the reconstruction loss"""
        model = build(config)
        initial = model.loss(data)
        _, history = train(model, data, TrainHyper(batch_size=20, epochs=100, lr=0.01))
        assert history[-1] < initial
        assert model.loss(data) < initial

    def test_loss_halves_over_long_run(self, config):
        """Test 500 epochs on 200 rows end at no more than half the first-epoch loss"""
        base = Rng(8).uniform(0, 1, (200, 2))
        data = [base, np.concatenate([base, base.mean(axis=1, keepdims=True)], axis=1)]
        _, history = train(build(config), data, TrainHyper(batch_size=50, epochs=500, lr=0.01))
        assert history[-1] <= 0.5 * history[0]

    def test_full_batch_ignores_shuffle_seed(self, config, data):
        """Test one batch per epoch gives the same history for any shuffle seed"""
        histories = [
            train(build(config), data, TrainHyper(batch_size=60, epochs=10, lr=0.01, shuffle_seed=s))[1]
            for s in (0, 9)
        ]
        assert histories[0] == histories[1]

    def test_reruns_are_identical(self, config, data):
        """Test identical seeds reproduce the history exactly"""
        hyper = TrainHyper(batch_size=16, epochs=5, lr=0.01, shuffle_seed=2)
        assert train(build(config), data, hyper)[1] == train(build(config), data, hyper)[1]

    def test_divergence_raises(self, config, data, mocker):
        """Test a non-finite loss stops training with epoch and batch"""
        model = build_fs(config, bottleneck=2)
        mocker.patch.object(model, "forward_backward", return_value=float("nan"))
        with pytest.raises(TrainingDivergedError) as info:
            train(model, data, TrainHyper(batch_size=16, epochs=3, lr=0.01))
        assert (info.value.epoch, info.value.batch) == (1, 1)

    def test_empty_data(self, config):
        """Test training on no rows raises"""
        empty = BranchView(branches=[np.zeros((0, 2)), np.zeros((0, 3))])
        with pytest.raises(InvalidDimensionError):
            train(build(config), empty, TrainHyper())

    def test_logs_progress(self, config, data, caplog):
        """Test an INFO line every log_every epochs and at the end"""
        with caplog.at_level(logging.INFO, logger="src.models.training"):
            train(build(config), data, TrainHyper(batch_size=60, epochs=5, lr=0.01, log_every=2))
        epochs = [r.getMessage() for r in caplog.records if r.getMessage().startswith("Epoch")]
        assert [m.split()[1] for m in epochs] == ["2/5", "4/5", "5/5"]
