#!/usr/bin/env python3
"""
Test suite for the multiple-input auto-encoder
"""

import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

# Add the project root to path so we can import our modules
sys.path.append(os.path.join(os.path.dirname(__file__), ".."))  # noqa

from src.errors import InvalidDimensionError  # noqa
from src.models import MiaeConfig, MiaeModel, TrainHyper, build, train  # noqa
from src.numerics import Rng, mse  # noqa


class TestMiaeConfig:
    """Test suite for architecture validation"""

    def test_decoder_mirrors_encoders(self):
        """Test decoder widths are the reversed per-level sums of branch widths"""
        config = MiaeConfig(
            branch_dims=[9, 13, 19], branch_hidden=[10, 7], z_per_branch=5
        )
        assert config.branch_hidden == [[10, 7], [10, 7], [10, 7]]
        assert config.decoder_hidden == [21, 30]
        assert config.d_z == 15
        assert config.d_x == 41

    def test_per_branch_hidden(self):
        """Test unequal branch widths at each level"""
        config = MiaeConfig(branch_dims=[3, 4], branch_hidden=[[4], [3]], z_per_branch=2)
        assert config.decoder_hidden == [7]

    def test_asymmetric_decoder_rejected(self):
        """Test an explicit decoder that does not mirror the encoders"""
        with pytest.raises(ValidationError):
            MiaeConfig(
                branch_dims=[3, 4],
                branch_hidden=[[4], [3]],
                z_per_branch=2,
                decoder_hidden=[8],
            )

    def test_unequal_depths_rejected(self):
        """Test sub-encoders must share a depth"""
        with pytest.raises(ValidationError):
            MiaeConfig(branch_dims=[3, 4], branch_hidden=[[4, 2], [3]], z_per_branch=2)

    def test_zero_width_rejected(self):
        """Test zero widths are invalid"""
        with pytest.raises(ValidationError):
            MiaeConfig(branch_dims=[3, 0], z_per_branch=2)
        with pytest.raises(ValidationError):
            MiaeConfig(branch_dims=[3], z_per_branch=0)

    def test_unknown_key_rejected(self):
        """Test extra keys are errors"""
        with pytest.raises(ValidationError):
            MiaeConfig(branch_dims=[3], z_per_branch=1, dropout=0.5)


class TestMiaeModel:
    """Test suite for building, encoding and decoding"""

    @pytest.fixture
    def config(self):
        """Fixture providing the toy two-branch architecture"""
        return MiaeConfig(branch_dims=[3, 4], branch_hidden=[[4], [3]], z_per_branch=2, seed=11)

    @pytest.fixture
    def batch(self):
        """Fixture providing five rows split into two branches"""
        rng = Rng(2)
        return [rng.uniform(0, 1, (5, 3)), rng.uniform(0, 1, (5, 4))]

    def test_table_topology(self):
        """Test the 41-column, three-branch layout builds the expected stacks"""
        model = build(
            MiaeConfig(branch_dims=[9, 13, 19], branch_hidden=[10, 7], z_per_branch=5)
        )
        assert [enc.widths for enc in model.encoders] == [
            [9, 10, 7, 5],
            [13, 10, 7, 5],
            [19, 10, 7, 5],
        ]
        assert model.decoder.widths == [15, 21, 30, 41]
        assert model.decoder.layers[-1].activation == "relu"
        assert all(layer.activation == "tanh" for layer in model.decoder.layers[:-1])

    def test_same_seed_same_weights(self, config):
        """Test construction is deterministic in the seed"""
        a = build(config).parameters()
        b = build(config).parameters()
        assert a.keys() == b.keys()
        assert all(np.array_equal(a[k], b[k]) for k in a)

    def test_encode_concatenates_branch_codes(self, config, batch):
        """Test z is the concatenation of per-branch tanh codes"""
        model = build(config)
        z = model.encode_batch(batch)
        assert z.shape == (5, 4)
        assert np.all(np.abs(z) < 1.0)
        first = model.encoders[0].forward(batch[0])
        assert np.array_equal(z[:, :2], first)

    def test_branch_order_permutes_latent_blocks(self, config, batch):
        """Test swapping branches and their encoders swaps the z blocks"""
        model = build(config)
        swapped = MiaeModel(
            MiaeConfig(branch_dims=[4, 3], branch_hidden=[[3], [4]], z_per_branch=2, seed=11),
            [model.encoders[1], model.encoders[0]],
            model.decoder,
        )
        z = model.encode_batch(batch)
        z_swapped = swapped.encode_batch([batch[1], batch[0]])
        assert np.array_equal(z_swapped, np.concatenate([z[:, 2:], z[:, :2]], axis=1))

    def test_overfits_one_repeated_sample(self):
        """Test training on one row repeated reconstructs it with MSE below 1e-3.

        A ReLU output that starts inactive for the row never receives gradient,
        so the seed is the first one whose initial reconstruction is positive.
        """
        row = [np.array([[0.3]]), np.array([[0.8]])]
        models = (
            build(MiaeConfig(branch_dims=[1, 1], branch_hidden=[2], z_per_branch=1, seed=s))
            for s in range(50)
        )
        model = next(m for m in models if np.all(m.decode(m.encode(row)) > 0.0))
        data = [np.repeat(row[0], 20, axis=0), np.repeat(row[1], 20, axis=0)]
        model, _ = train(model, data, TrainHyper(batch_size=20, epochs=1000, lr=0.01))
        xhat = model.decode(model.encode(row))
        assert mse(np.concatenate(row, axis=1), xhat) < 1e-3

    def test_single_row_matches_batch(self, config, batch):
        """Test encode on one row equals the matching batch row"""
        model = build(config)
        z = model.encode_batch(batch)
        assert np.array_equal(model.encode([b[2] for b in batch]), z[2])

    def test_decode_is_non_negative(self, config, batch):
        """Test the ReLU output layer"""
        model = build(config)
        xhat = model.decode_batch(model.encode_batch(batch))
        assert xhat.shape == (5, 7)
        assert np.all(xhat >= 0.0)

    def test_loss_is_reconstruction_mse(self, config, batch):
        """Test loss equals MSE between the concatenated input and its reconstruction"""
        model = build(config)
        target = np.concatenate(batch, axis=1)
        assert model.loss(batch) == mse(target, model.reconstruct_batch(batch))

    def test_branch_width_mismatch(self, config, batch):
        """Test a branch with the wrong width raises"""
        model = build(config)
        with pytest.raises(InvalidDimensionError):
            model.encode_batch([batch[0], batch[1][:, :3]])

    def test_branch_count_mismatch(self, config, batch):
        """Test the wrong number of branches raises"""
        with pytest.raises(InvalidDimensionError):
            build(config).encode_batch(batch[:1])
