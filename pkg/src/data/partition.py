"""Column partitions that feed one sub-encoder per branch."""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..errors import InvalidDimensionError
from .tabular import TabularDataset


@dataclass(frozen=True)
class BranchPartition:
    """Contiguous column ranges, one per branch, covering all columns in order"""

    widths: tuple[int, ...]

    def __post_init__(self):
        if not self.widths:
            raise InvalidDimensionError("a partition needs at least one branch")
        if any(w < 1 for w in self.widths):
            raise InvalidDimensionError(f"branch widths must be >= 1, got {self.widths}")

    @property
    def n_branches(self) -> int:
        return len(self.widths)

    @property
    def total_width(self) -> int:
        return sum(self.widths)

    @property
    def ranges(self) -> List[tuple[int, int]]:
        bounds = np.concatenate([[0], np.cumsum(self.widths)])
        return [(int(bounds[j]), int(bounds[j + 1])) for j in range(len(self.widths))]

    def split(self, features: np.ndarray) -> "BranchView":
        if features.ndim != 2 or features.shape[1] != self.total_width:
            raise InvalidDimensionError(
                f"expected {self.total_width} columns, got shape {features.shape}"
            )
        return BranchView(
            branches=[features[:, lo:hi].copy() for lo, hi in self.ranges]
        )


@dataclass(frozen=True)
class BranchView:
    branches: List[np.ndarray]

    @property
    def n_samples(self) -> int:
        return self.branches[0].shape[0]

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.branches)

    def rows(self, index) -> "BranchView":
        return BranchView(branches=[b[index] for b in self.branches])

    def concat(self) -> np.ndarray:
        return np.concatenate(self.branches, axis=1)


def equal_widths(d: int, n: int) -> tuple[int, ...]:
    """Split d columns into n branches; earlier branches take the extra column"""
    if n < 1 or n > d:
        raise InvalidDimensionError(f"cannot split {d} columns into {n} branches")
    base, extra = divmod(d, n)
    return tuple([base + 1] * extra + [base] * (n - extra))


def partition_features(
    ds: TabularDataset,
    widths: Optional[Sequence[int]] = None,
    n_branches: Optional[int] = None,
) -> tuple[BranchPartition, BranchView]:
    """Explicit widths (in column order) or an equal split into ``n_branches``"""
    if (widths is None) == (n_branches is None):
        raise InvalidDimensionError("give exactly one of widths or n_branches")
    d = ds.n_features
    if widths is not None:
        widths = tuple(int(w) for w in widths)
        if sum(widths) != d:
            raise InvalidDimensionError(
                f"branch widths {widths} sum to {sum(widths)}, dataset has {d} columns"
            )
    else:
        widths = equal_widths(d, int(n_branches))
    partition = BranchPartition(widths=widths)
    return partition, partition.split(ds.features)
