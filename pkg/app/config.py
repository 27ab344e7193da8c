"""
Solver and run configuration
"""
import os
from dotenv import load_dotenv

load_dotenv()


class SarlSettings:
    """Numeric defaults and run settings. Only the output directory reads the environment."""

    # Output
    OUTPUT_DIR: str = os.getenv("SARL_OUTPUT_DIR", "runs")
    FLOAT_FORMAT: str = "%.17g"  # round-trips float64 exactly

    # Linear algebra
    RANK_CUTOFF: float = 1e-10  # relative singular-value cutoff
    EIG_NEGATIVITY_THRESHOLD: float = 1e-9  # relative to ||B||_2

    # Kernels
    RBF_MEDIAN_SUBSAMPLE: int = 1000
    POLY_DEGREE: int = 5
    POLY_COEF0: float = 1.0

    # Trade-off search
    BISECT_MAX_ITER: int = 100
    SWEEP_POINTS: int = 21
    SWEEP_WORKERS: int = 4

    # Evaluation heads
    LOGISTIC_LEARNING_RATE: float = 0.1
    LOGISTIC_EPOCHS: int = 500
    LOGISTIC_L2: float = 1e-4

    # Reproducibility
    RNG_ALGORITHM: str = "PCG64"
    TRAIN_FRACTION: float = 0.8


settings = SarlSettings()
