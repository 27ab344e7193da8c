"""
Pydantic schemas for run configuration and run reports
"""
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from app.config import settings
from app.engine.kernels import MEDIAN_HEURISTIC, KernelFamily, KernelSpec
from app.models.encoder import SolverMode


class KernelConfig(BaseModel):
    family: KernelFamily = KernelFamily.RBF
    degree: int = Field(default=settings.POLY_DEGREE, ge=1)
    coef0: float = settings.POLY_COEF0
    bandwidth: Union[float, str] = MEDIAN_HEURISTIC

    def to_spec(self) -> KernelSpec:
        return KernelSpec(family=self.family, degree=self.degree, coef0=self.coef0, bandwidth=self.bandwidth)


class RunConfig(BaseModel):
    """Everything needed to re-run one CLI command."""
    command: str
    n_samples: Optional[int] = Field(default=None, gt=0)  # synth
    mode: SolverMode = SolverMode.LINEAR
    kernel: Optional[KernelConfig] = None
    lam: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    lambda_grid: Optional[List[float]] = None
    alpha_tol: Optional[float] = None
    epsilon: Optional[float] = Field(default=None, gt=0.0)
    max_iter: int = Field(default=settings.BISECT_MAX_ITER, ge=1)
    data_path: Optional[str] = None
    test_path: Optional[str] = None
    spec_path: Optional[str] = None
    encoder_path: Optional[str] = None  # embed input
    reference_path: Optional[str] = None
    output_path: Optional[str] = None  # embed CSV or eval report
    train_fraction: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    seed: int = 0
    output_dir: str = settings.OUTPUT_DIR
    standardize: Optional[bool] = None
    include_zero_eigenvectors: bool = False
    max_rank: Optional[int] = Field(default=None, ge=0)
    evaluate: bool = False
    workers: int = Field(default=settings.SWEEP_WORKERS, ge=1)


class BoundsReport(BaseModel):
    gamma_min: float
    gamma_max: float
    alpha_min: float
    alpha_max: float
    alpha_star_min: float


class PointReport(BaseModel):
    lam: float
    r: int
    J_y: float
    J_s: float
    target_accuracy: Optional[float] = None
    adversary_accuracy: Optional[float] = None


class BisectionReport(BaseModel):
    alpha_tol: float
    epsilon: float
    iterations: int
    trace: List[Dict[str, float]] = Field(default_factory=list)


class EvaluationSummary(BaseModel):
    r: int
    target_accuracy: float
    adversary_accuracy: float
    target_prior: float
    adversary_prior: float
    delta_star: float
    target_diverged: bool = False
    adversary_diverged: bool = False


class RunReport(BaseModel):
    """Self-contained record of one run: config echo, results, timings and RNG identity."""
    config: RunConfig
    n_train: Optional[int] = None
    n_test: Optional[int] = None
    n_embedded: Optional[int] = None
    rho: Optional[int] = None
    bounds: Optional[BoundsReport] = None
    points: List[PointReport] = Field(default_factory=list)
    bisection: Optional[BisectionReport] = None
    evaluation: Optional[EvaluationSummary] = None
    feature_weights: Optional[Dict[str, float]] = None
    encoder_path: Optional[str] = None
    timings: Dict[str, float] = Field(default_factory=dict)  # seconds per stage
    rng: Dict[str, Union[str, int]] = Field(default_factory=dict)
    resolved_bandwidth: Optional[float] = None
