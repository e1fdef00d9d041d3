"""Exception hierarchy shared by every package in the toolkit."""

from typing import Optional


class MiaeError(Exception):
    """Base class for all toolkit errors"""


class InvalidDimensionError(MiaeError):
    """Shape or width mismatch, or a zero dimension"""


class NumericError(MiaeError):
    """A non-finite value appeared where a finite one is required"""


class IngestionError(MiaeError):
    """A CSV file could not be turned into a dataset"""

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[str] = None
    ):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigurationError(MiaeError, ValueError):
    """Invalid model or pipeline configuration"""


class TrainingDivergedError(MiaeError):
    """Loss became non-finite during training"""

    def __init__(self, epoch: int, batch: int, loss: float):
        super().__init__(
            f"non-finite loss {loss} at epoch {epoch}, batch {batch}"
        )
        self.epoch = epoch
        self.batch = batch
        self.loss = loss


class UndefinedMetricError(MiaeError):
    """A metric has a zero denominator"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        # Partial result for callers that still want the defined parts
        self.report = report


class StratificationError(MiaeError):
    """A class would be missing from the training side of a split"""


class ModelFormatError(MiaeError):
    """Model file is unreadable or has an unsupported version"""
