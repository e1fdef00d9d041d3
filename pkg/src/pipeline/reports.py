"""CSV writers for every pipeline artifact."""

import os
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import Config
from ..metrics.detection import ConfusionMatrix
from ..models.miaefs import FeatureRanking


def _write(frame: pd.DataFrame, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=Config.CSV_FLOAT_FORMAT,
        na_rep="nan",
        lineterminator="\n",
    )
    return path


def write_metric_rows(rows: Sequence[Tuple[str, float]], path: str) -> str:
    """Two columns: metric, value"""
    return _write(pd.DataFrame(list(rows), columns=["metric", "value"]), path)


def write_confusion(cm: ConfusionMatrix, path: str) -> str:
    """Rows are true classes, columns predicted classes, headed by class name"""
    names = cm.names()
    frame = pd.DataFrame(cm.counts, columns=names)
    frame.insert(0, "true_class", names)
    return _write(frame, path)


def write_loss_history(history: List[float], path: str) -> str:
    frame = pd.DataFrame(
        {"epoch": np.arange(1, len(history) + 1), "loss": np.asarray(history)}
    )
    return _write(frame, path)


def write_ranking(ranking: FeatureRanking, path: str) -> str:
    """One row per latent feature, most important first"""
    frame = pd.DataFrame(
        {
            "rank": np.arange(1, ranking.d_z + 1),
            "feature_index": ranking.order,
            "feature": [f"z{i}" for i in ranking.order],
            "score": ranking.scores[ranking.order],
        }
    )
    return _write(frame, path)


def write_table(
    records: List[Dict[str, float]], path: str, columns: Optional[List[str]] = None
) -> str:
    return _write(pd.DataFrame.from_records(records, columns=columns), path)
