import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    # Logging configuration
    LOG_DIR = os.getenv("MIAE_LOG_DIR", "logs")
    LOG_LEVEL = os.getenv("MIAE_LOG_LEVEL", "INFO")

    # Training defaults (desk scale; full reproduction uses 3000 epochs)
    DEFAULT_SEED = int(os.getenv("MIAE_DEFAULT_SEED", "0"))
    DEFAULT_EPOCHS = int(os.getenv("MIAE_DEFAULT_EPOCHS", "50"))
    DEFAULT_BATCH_SIZE = int(os.getenv("MIAE_DEFAULT_BATCH_SIZE", "100"))
    DEFAULT_LR = float(os.getenv("MIAE_DEFAULT_LR", "1e-4"))
    LOG_EVERY = int(os.getenv("MIAE_LOG_EVERY", "10"))

    # Forest building workers
    N_JOBS = int(os.getenv("MIAE_N_JOBS", "1"))

    # Adam defaults
    ADAM_BETA1 = 0.9
    ADAM_BETA2 = 0.999
    ADAM_EPS = 1e-8

    # Feature selection
    L21_EPS = 1e-12
    DEFAULT_ALPHA = 1.0
    BETA_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    BRANCH_GRID = [3, 5, 7, 9, 15, 25, 35]
    Z_DIM_GRID = [5, 10, 15, 20, 25, 30, 35, 50]

    # Grid search settings for the downstream classifiers
    DT_MAX_DEPTH_GRID = [5, 10, 20, 50, 100]
    RF_N_ESTIMATORS_GRID = [5, 10, 20, 50, 100, 150]
    VALIDATION_FRACTION = 0.2

    # Gradient check
    FINITE_DIFF_EPS = 1e-5

    # Model file format
    MODEL_FORMAT_VERSION = 1

    # Float format used for every CSV artifact
    CSV_FLOAT_FORMAT = "%.17g"
