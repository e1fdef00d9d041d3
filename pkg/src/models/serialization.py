"""Versioned JSON model documents.

Floats are written with Python's shortest round-trip representation, so a
reloaded model reproduces encodings bit for bit.
"""

import json
import logging
import os
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..config import Config
from ..data.normalization import NormalizationStats
from ..errors import ModelFormatError
from .layers import Dense, LayerStack
from .miae import MiaeConfig, MiaeModel
from .miaefs import MiaefsModel

logger = logging.getLogger(__name__)

Model = Union[MiaeModel, MiaefsModel]


class ParameterBlock(BaseModel):
    """One weight matrix or bias vector"""

    model_config = ConfigDict(extra="forbid")

    shape: List[int] = Field(..., description="Array shape")
    values: List[float] = Field(..., description="Row-major values")
    activation: Optional[str] = Field(None, description="Layer activation, on weights only")


class ModelDocument(BaseModel):
    """Everything needed to rebuild a trained model"""

    model_config = ConfigDict(extra="forbid")

    format_version: int = Field(..., description="Model file format version")
    kind: Literal["miae", "miaefs"] = Field(..., description="Model family")
    config: MiaeConfig = Field(..., description="Architecture and initialization seed")
    alpha: Optional[float] = Field(None, description="L2,1 weight (miaefs only)")
    normalization: Optional[Dict[str, List[float]]] = Field(
        None, description="Training-split min/max per input column"
    )
    feature_names: Optional[List[str]] = Field(None, description="Input column names")
    parameters: Dict[str, ParameterBlock] = Field(..., description="Named parameters")


def _block(array: np.ndarray, activation: Optional[str] = None) -> ParameterBlock:
    return ParameterBlock(
        shape=list(array.shape), values=array.reshape(-1).tolist(), activation=activation
    )


def _stack_blocks(stack: LayerStack, prefix: str) -> Dict[str, ParameterBlock]:
    blocks = {}
    for i, layer in enumerate(stack.layers):
        blocks[f"{prefix}.{i}.W"] = _block(layer.W, layer.activation)
        blocks[f"{prefix}.{i}.b"] = _block(layer.b)
    return blocks


def to_document(
    model: Model,
    normalization: Optional[NormalizationStats] = None,
    feature_names: Optional[List[str]] = None,
) -> ModelDocument:
    blocks: Dict[str, ParameterBlock] = {}
    for j, encoder in enumerate(model.encoders):
        blocks.update(_stack_blocks(encoder, f"encoder.{j}"))
    if isinstance(model, MiaefsModel):
        blocks["fs.W"] = _block(model.fs_layer.W, model.fs_layer.activation)
        blocks["fs.b"] = _block(model.fs_layer.b)
    blocks.update(_stack_blocks(model.decoder, "decoder"))
    return ModelDocument(
        format_version=Config.MODEL_FORMAT_VERSION,
        kind=model.kind,
        config=model.config,
        alpha=model.alpha if isinstance(model, MiaefsModel) else None,
        normalization=normalization.to_dict() if normalization is not None else None,
        feature_names=feature_names,
        parameters=blocks,
    )


def save_model(
    model: Model,
    path: str,
    normalization: Optional[NormalizationStats] = None,
    feature_names: Optional[List[str]] = None,
) -> str:
    document = to_document(model, normalization, feature_names)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document.model_dump(mode="python"), f, indent=2, allow_nan=False)
        f.write("\n")
    logger.info(f"Saved {model.kind} model to {path}")
    return path


def _array(block: ParameterBlock) -> np.ndarray:
    return np.asarray(block.values, dtype=np.float64).reshape(block.shape)


def _dense(blocks: Dict[str, ParameterBlock], prefix: str) -> Dense:
    weights = blocks[f"{prefix}.W"]
    return Dense(_array(weights), _array(blocks[f"{prefix}.b"]), weights.activation)


def _stack(blocks: Dict[str, ParameterBlock], prefix: str) -> LayerStack:
    count = sum(1 for name in blocks if name.startswith(f"{prefix}.") and name.endswith(".W"))
    return LayerStack([_dense(blocks, f"{prefix}.{i}") for i in range(count)])


def from_document(document: ModelDocument) -> Model:
    if document.format_version != Config.MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {document.format_version}"
        )
    blocks = document.parameters
    try:
        encoders = [
            _stack(blocks, f"encoder.{j}") for j in range(document.config.n_branches)
        ]
        decoder = _stack(blocks, "decoder")
        if document.kind == "miaefs":
            return MiaefsModel(
                document.config,
                encoders,
                _dense(blocks, "fs"),
                decoder,
                document.alpha or 0.0,
            )
        return MiaeModel(document.config, encoders, decoder)
    except (KeyError, ValueError) as e:
        raise ModelFormatError(f"inconsistent parameter blocks: {e}") from None


def load_model(path: str) -> Tuple[Model, ModelDocument]:
    """Rebuild a model; the document carries normalization and column names"""
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        document = ModelDocument.model_validate(raw)
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}") from None
    except (json.JSONDecodeError, ValidationError) as e:
        raise ModelFormatError(f"unreadable model file {path}: {e}") from None
    model = from_document(document)
    logger.info(f"Loaded {document.kind} model from {path}")
    return model, document


def document_normalization(document: ModelDocument) -> Optional[NormalizationStats]:
    if document.normalization is None:
        return None
    return NormalizationStats.from_dict(document.normalization)
