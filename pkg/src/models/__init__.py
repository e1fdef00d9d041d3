from .autoencoder import AutoEncoder
from .miae import MiaeConfig, MiaeModel, build
from .miaefs import (
    FeatureRanking,
    MiaefsModel,
    build_fs,
    importance_scores,
    l21_norm,
    reconstruct_masked,
    select_features,
)
from .serialization import load_model, save_model
from .training import TrainHyper, train
