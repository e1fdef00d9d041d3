from .normalization import NormalizationStats, apply_minmax, fit_minmax
from .partition import BranchPartition, BranchView, partition_features
from .tabular import TabularDataset, align_labels, load_csv, write_csv
