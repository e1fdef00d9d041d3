"""
Pydantic schemas for pipeline configuration files, run manifests and errors
"""

from datetime import datetime
from typing import Dict, List, Literal, Optional, Union

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_serializer,
    field_validator,
    model_validator,
)

from ..classifiers.grid_search import GridSearchSpec
from ..config import Config
from ..errors import ConfigurationError
from ..models.training import TrainHyper


class DatasetSection(BaseModel):
    """Where the data comes from and how labels are read"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    train: str = Field(..., description="Training CSV path")
    test: Optional[str] = Field(None, description="Test CSV path")
    label_column: str = Field("label", description="Name of the label column")
    normal_class: Optional[str] = Field(
        None, description="Class treated as benign for FAR/MDR"
    )
    normalize: bool = Field(True, description="Min-max scale with training statistics")


class PartitionSection(BaseModel):
    """Explicit branch widths in column order, or an equal split"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    widths: Optional[List[int]] = Field(None, description="Column count per branch")
    branches: Optional[int] = Field(None, ge=1, description="Number of equal branches")

    @model_validator(mode="after")
    def exactly_one(self):
        if (self.widths is None) == (self.branches is None):
            raise ValueError("give exactly one of 'widths' or 'branches'")
        if self.widths is not None and (not self.widths or min(self.widths) < 1):
            raise ValueError("branch widths must be positive")
        return self


class ModelSection(BaseModel):
    """Architecture, feature-selection settings and the initialization seed"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["miae", "miaefs"] = Field("miaefs", description="Model family")
    branch_hidden: List[Union[int, List[int]]] = Field(
        default_factory=list,
        description="Hidden widths shared by every branch, or one list per branch",
    )
    z_per_branch: int = Field(5, ge=1, description="Latent width of each sub-encoder")
    decoder_hidden: Optional[List[int]] = Field(
        None, description="Decoder hidden widths; mirrored from the encoders when omitted"
    )
    alpha: float = Field(Config.DEFAULT_ALPHA, ge=0, description="L2,1 penalty weight")
    bottleneck: Optional[int] = Field(None, ge=1, description="Selection layer width d_h")
    beta: float = Field(0.5, description="Share of ranked latent features kept")
    betas: List[float] = Field(
        default_factory=lambda: list(Config.BETA_GRID), description="Betas for sweeps"
    )
    sweep_branches: List[int] = Field(
        default_factory=lambda: list(Config.BRANCH_GRID),
        description="Branch counts for the architecture sweep",
    )
    sweep_z_per_branch: List[int] = Field(
        default_factory=lambda: [5], description="Latent widths for the architecture sweep"
    )
    seed: int = Field(Config.DEFAULT_SEED, ge=0, description="Weight initialization seed")

    @field_validator("beta")
    @classmethod
    def beta_in_range(cls, value):
        if not 0.0 < value <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {value}")
        return value

    @field_validator("betas")
    @classmethod
    def betas_in_range(cls, values):
        if not values:
            raise ValueError("betas must not be empty")
        for value in values:
            if not 0.0 < value <= 1.0:
                raise ValueError(f"beta must be in (0, 1], got {value}")
        return values

    @field_validator("sweep_branches", "sweep_z_per_branch")
    @classmethod
    def positive_counts(cls, values):
        if not values or min(values) < 1:
            raise ValueError("sweep lists need positive entries")
        return values

    def per_branch_hidden(self, n_branches: int) -> List[List[int]]:
        hidden = self.branch_hidden
        if all(isinstance(h, int) for h in hidden):
            return [list(hidden) for _ in range(n_branches)]
        if len(hidden) != n_branches or not all(isinstance(h, list) for h in hidden):
            raise ConfigurationError(
                f"branch_hidden has {len(hidden)} entries for {n_branches} branches"
            )
        return [list(h) for h in hidden]


class PipelineConfig(BaseModel):
    """One experiment, from CSV files to reports"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dataset: DatasetSection
    partition: PartitionSection
    model: ModelSection = Field(default_factory=ModelSection)
    training: TrainHyper = Field(default_factory=TrainHyper)
    classifier: GridSearchSpec = Field(default_factory=GridSearchSpec)
    output_dir: str = Field("output", description="Directory for every artifact")


class ArtifactEntry(BaseModel):
    path: str = Field(..., description="File path relative to the output directory")
    sha256: str = Field(..., description="Hex digest of the file contents")
    bytes: int = Field(..., description="File size")


class RunManifest(BaseModel):
    """What a command wrote, with the seeds and timings of the run"""

    command: str = Field(..., description="CLI verb")
    config_hash: str = Field(..., description="SHA-256 of the canonical configuration")
    seeds: Dict[str, int] = Field(default_factory=dict, description="Seeds in effect")
    artifacts: List[ArtifactEntry] = Field(default_factory=list)
    timings: Dict[str, float] = Field(
        default_factory=dict, description="Wall-clock seconds per stage"
    )
    model_sizes: Dict[str, int] = Field(
        default_factory=dict, description="Model file bytes and parameter counts"
    )
    created: datetime = Field(default_factory=datetime.now)

    @field_serializer("created")
    def serialize_created(self, value: datetime) -> str:
        return value.isoformat()


class ErrorResponse(BaseModel):
    """Single-line error report printed by the CLI"""

    error: str = Field(..., description="Error type")
    detail: Optional[str] = Field(None, description="Detailed error information")
    timestamp: datetime = Field(default_factory=datetime.now, description="Error timestamp")

    @field_serializer("timestamp")
    def serialize_timestamp(self, value: datetime) -> str:
        return value.isoformat()


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_config(raw: dict) -> PipelineConfig:
    try:
        return PipelineConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(f"invalid pipeline config: {_validation_message(e)}") from None


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except yaml.YAMLError as e:
        raise ConfigurationError(f"config file {path} is not valid YAML: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config file {path} must hold a mapping")
    return parse_config(raw)


def with_overrides(
    config: PipelineConfig,
    seed: Optional[int] = None,
    beta: Optional[float] = None,
    out: Optional[str] = None,
    label_column: Optional[str] = None,
    normal_class: Optional[str] = None,
) -> PipelineConfig:
    """Apply CLI flags on top of a loaded config and validate the result"""
    raw = config.model_dump(mode="python")
    if seed is not None:
        raw["model"]["seed"] = seed
        raw["training"]["shuffle_seed"] = seed
        raw["classifier"]["seed"] = seed
    if beta is not None:
        raw["model"]["beta"] = beta
    if out is not None:
        raw["output_dir"] = out
    if label_column is not None:
        raw["dataset"]["label_column"] = label_column
    if normal_class is not None:
        raw["dataset"]["normal_class"] = normal_class
    return parse_config(raw)
