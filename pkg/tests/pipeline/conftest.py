#!/usr/bin/env python3
"""
Test fixtures and configuration for pipeline tests
"""

import os
import sys

import numpy as np
import pandas as pd
import pytest
import yaml

# Add the project root to path so we can import our modules
sys.path.append(os.path.join(os.path.dirname(__file__), "..", ".."))  # noqa

from src.numerics import Rng  # noqa
from src.pipeline.schemas import parse_config  # noqa

CLASS_CENTERS = {
    "normal": [0, 0, 0, 0, 0, 0],
    "dos": [5, 5, 5, 0, 0, 0],
    "probe": [0, 0, 0, 5, 5, 5],
}
COLUMN_SCALE = np.array([1.0, 2.0, 10.0, 1.0, 3.0, 100.0])


def blob_frame(seed, n_per_class):
    """Three well separated classes over six columns of different scales"""
    rng = Rng(seed)
    parts, labels = [], []
    for name, center in CLASS_CENTERS.items():
        parts.append((rng.normal(0, 0.4, (n_per_class, 6)) + center) * COLUMN_SCALE)
        labels += [name] * n_per_class
    frame = pd.DataFrame(np.concatenate(parts), columns=[f"f{i}" for i in range(6)])
    frame["label"] = labels
    return frame


@pytest.fixture
def blob_csvs(tmp_path):
    """Training and test CSVs of the three-class blob data"""
    train_path = tmp_path / "train.csv"
    test_path = tmp_path / "test.csv"
    blob_frame(1, 30).to_csv(train_path, index=False)
    blob_frame(2, 15).to_csv(test_path, index=False)
    return str(train_path), str(test_path)


@pytest.fixture
def raw_config(tmp_path, blob_csvs):
    """Small MIAEFS pipeline config as a plain mapping"""
    train_path, test_path = blob_csvs
    return {
        "dataset": {
            "train": train_path,
            "test": test_path,
            "label_column": "label",
            "normal_class": "normal",
        },
        "partition": {"widths": [2, 2, 2]},
        "model": {
            "kind": "miaefs",
            "branch_hidden": [3],
            "z_per_branch": 2,
            "alpha": 0.1,
            "beta": 0.5,
            "betas": [0.5, 1.0],
            "sweep_branches": [1, 2],
            "sweep_z_per_branch": [1],
            "seed": 3,
        },
        "training": {"batch_size": 30, "epochs": 20, "lr": 0.01, "shuffle_seed": 3},
        "classifier": {"family": "rf", "grid": {"n_estimators": [3, 5]}, "seed": 3},
        "output_dir": str(tmp_path / "out"),
    }


@pytest.fixture
def pipeline_config(raw_config):
    """Validated pipeline config"""
    return parse_config(raw_config)


@pytest.fixture
def config_file(tmp_path, raw_config):
    """The same config written as YAML"""
    path = tmp_path / "pipeline.yaml"
    path.write_text(yaml.safe_dump(raw_config), encoding="utf-8")
    return str(path)


@pytest.fixture
def hand_quality_csv(tmp_path):
    """Two 1-D classes {0.0, 0.2} and {1.0, 1.2}"""
    path = tmp_path / "hand.csv"
    path.write_text("z0,label\n0.0,a\n0.2,a\n1.0,b\n1.2,b\n", encoding="utf-8")
    return str(path)

