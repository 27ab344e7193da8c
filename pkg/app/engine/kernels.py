"""
Kernels - kernel functions, Gram matrices and double-centering for the kernel-path solver.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist, pdist

from app.config import settings
from app.engine.numerics import as_matrix
from app.errors import EmptyInput, InvalidParameter, ShapeMismatch

logger = logging.getLogger(__name__)

MEDIAN_HEURISTIC = "median"


class KernelFamily(str, Enum):
    LINEAR = "linear"
    POLYNOMIAL = "polynomial"
    RBF = "rbf"


@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily = KernelFamily.RBF
    degree: int = settings.POLY_DEGREE
    coef0: float = settings.POLY_COEF0
    bandwidth: Union[float, str] = MEDIAN_HEURISTIC

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if self.family == KernelFamily.POLYNOMIAL and self.degree < 1:
            raise InvalidParameter(f"Polynomial degree must be >= 1, got {self.degree}")
        if self.bandwidth != MEDIAN_HEURISTIC:
            if not isinstance(self.bandwidth, (int, float)) or not self.bandwidth > 0:
                raise InvalidParameter(f"RBF bandwidth must be positive or '{MEDIAN_HEURISTIC}', got {self.bandwidth!r}")

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "degree": self.degree,
            "coef0": self.coef0,
            "bandwidth": self.bandwidth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(
            family=KernelFamily(d.get("family", KernelFamily.RBF.value)),
            degree=int(d.get("degree", settings.POLY_DEGREE)),
            coef0=float(d.get("coef0", settings.POLY_COEF0)),
            bandwidth=d.get("bandwidth", MEDIAN_HEURISTIC),
        )


@dataclass(frozen=True)
class KernelModel:
    """Training data, its Gram matrix K and the double-centered Gram matrix."""
    spec: KernelSpec
    train_X: np.ndarray  # d x n, uncentered
    K: np.ndarray
    K_centered: np.ndarray
    resolved_bandwidth: float

    @property
    def n_samples(self) -> int:
        return self.train_X.shape[1]

    @property
    def column_means(self) -> np.ndarray:
        """K 1 / n: the kernel vector of the feature-space training mean."""
        return self.K.mean(axis=1)


def median_bandwidth(X, seed: int = 0, max_points: int = settings.RBF_MEDIAN_SUBSAMPLE) -> float:
    """Median pairwise distance over at most `max_points` seeded-subsampled columns of X."""
    X = as_matrix(X, "X")
    n = X.shape[1]
    if n == 0:
        raise EmptyInput("Cannot resolve a bandwidth on empty data")
    if n > max_points:
        rng = np.random.Generator(np.random.PCG64(seed))
        X = X[:, np.sort(rng.choice(n, size=max_points, replace=False))]
    if X.shape[1] < 2:
        logger.warning("Median heuristic needs two samples; falling back to bandwidth 1.0")
        return 1.0
    median = float(np.median(pdist(X.T)))
    if median <= 0.0:
        logger.warning("All sampled points coincide; falling back to bandwidth 1.0")
        return 1.0
    return median


def resolve_bandwidth(spec: KernelSpec, X, seed: int = 0) -> float:
    if spec.family != KernelFamily.RBF:
        return 0.0
    if spec.bandwidth == MEDIAN_HEURISTIC:
        return median_bandwidth(X, seed=seed)
    return float(spec.bandwidth)


def _pairwise(spec: KernelSpec, A: np.ndarray, B: np.ndarray, bandwidth: float) -> np.ndarray:
    """Kernel values k(a_i, b_j) for columns of A (d x n) and B (d x m) -> n x m."""
    if spec.family == KernelFamily.LINEAR:
        return A.T @ B
    if spec.family == KernelFamily.POLYNOMIAL:
        return (A.T @ B + spec.coef0) ** spec.degree
    return np.exp(-cdist(A.T, B.T, "sqeuclidean") / (2.0 * bandwidth ** 2))


def gram(spec: KernelSpec, X, bandwidth: Optional[float] = None) -> np.ndarray:
    """
    Gram matrix K[i, j] = k(x_i, x_j) over the columns of X.

    linear: x^T x'; polynomial: (x^T x' + coef0)^degree;
    rbf: exp(-||x - x'||^2 / (2 bandwidth^2)).
    """
    X = as_matrix(X, "X")
    if X.shape[1] == 0:
        raise EmptyInput("Cannot build a Gram matrix on empty data")
    if bandwidth is None:
        bandwidth = resolve_bandwidth(spec, X)
    return _pairwise(spec, X, X, bandwidth)


def center_gram(K) -> np.ndarray:
    """Double-centering K~ = D^T K D; every row and column of the result sums to zero."""
    K = as_matrix(K, "K")
    if K.shape[0] != K.shape[1]:
        raise ShapeMismatch(f"Gram matrix must be square, got shape {K.shape}")
    row_means = K.mean(axis=1, keepdims=True)
    col_means = K.mean(axis=0, keepdims=True)
    return K - row_means - col_means + K.mean()


def warn_if_not_psd(smallest: float, largest: float) -> bool:
    """Log a warning when a Gram spectrum dips below -1e-8 * largest. Returns True if it did."""
    if smallest < -1e-8 * max(largest, 0.0):
        logger.warning(
            "Gram matrix is not PSD within tolerance (smallest eigenvalue %.3e, largest %.3e); "
            "negative directions are dropped by the rank cutoff",
            smallest, largest,
        )
        return True
    return False


def fit_kernel_model(spec: KernelSpec, X, seed: int = 0) -> KernelModel:
    """Resolve the bandwidth, build the Gram matrix and its double-centered form."""
    X = as_matrix(X, "X")
    bandwidth = resolve_bandwidth(spec, X, seed=seed)
    K = gram(spec, X, bandwidth=bandwidth)
    return KernelModel(spec=spec, train_X=X, K=K, K_centered=center_gram(K), resolved_bandwidth=bandwidth)


def kernel_vector(model: KernelModel, x) -> np.ndarray:
    """
    [k(x_1, x), ..., k(x_n, x)] for a single sample x, or an n x m block
    when x is a d x m batch.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = as_matrix(x.reshape(-1, 1) if single else x, "x")
    d = model.train_X.shape[0]
    if batch.shape[0] != d:
        raise ShapeMismatch(f"Sample dimension {batch.shape[0]} does not match training dimension {d}")
    values = _pairwise(model.spec, model.train_X, batch, model.resolved_bandwidth)
    return values[:, 0] if single else values
