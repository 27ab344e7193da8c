"""
Spectral solver - global optimum of the adversarial trade-off via the negative eigenspace of B.

Pipeline: build_problem_* -> build_B -> spectral_solve -> recover_encoder -> objectives.
The production path (``solve``) works on a compressed form of B: B has rank at
most p + q, so its nonzero spectrum is found on an orthonormal basis U of the
row space of [S~ L_x; Y~ L_x] and mapped back with G_E = U G_small.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from app.config import settings
from app.engine.kernels import KernelModel, kernel_vector, warn_if_not_psd
from app.engine.numerics import (
    DEFAULT_TOLERANCE,
    RankTolerance,
    as_matrix,
    center_columns,
    null_space_basis,
    orthonormal_range,
    pseudo_inverse,
    psd_factorization,
    sym_eig,
)
from app.errors import EmptyInput, InvalidLambda, InvalidParameter, ShapeMismatch
from app.models.encoder import Encoder, SolverMode

logger = logging.getLogger(__name__)


def _as_rows(values, name: str) -> np.ndarray:
    """Like as_matrix, but a 1-D input becomes a single row (one variable over n samples)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return as_matrix(arr, name)


def _check_lambda(lam: float):
    if not (0.0 <= lam <= 1.0):  # also rejects NaN
        raise InvalidLambda(lam)


@dataclass(frozen=True, eq=False)
class Problem:
    """
    Centered data projected onto the basis L_x of the encoder's search space.

    L_x spans range(X~^T) in linear mode and range(K~) in kernel mode. The
    projections A_y = Y~ L_x and A_s = S~ L_x are all the solver ever needs;
    the n x n middle product of B is never formed.
    """
    mode: SolverMode
    L_x: np.ndarray  # n x rho, orthonormal columns
    Y_centered: np.ndarray  # p x n
    S_centered: np.ndarray  # q x n
    recovery_factor: np.ndarray  # X~^+ (n x d) or K~^+ (n x n)
    encoder_basis: np.ndarray  # L_x^T recovery_factor: rho x d or rho x n
    x_mean: np.ndarray
    y_mean: np.ndarray
    s_mean: np.ndarray
    kernel: Optional[KernelModel] = None
    tol: RankTolerance = DEFAULT_TOLERANCE
    A_y: np.ndarray = field(init=False, repr=False)
    A_s: np.ndarray = field(init=False, repr=False)
    label_basis: np.ndarray = field(init=False, repr=False)  # U: rho x k, spans row([A_s; A_y])

    def __post_init__(self):
        A_y = self.Y_centered @ self.L_x
        A_s = self.S_centered @ self.L_x
        stacked = np.vstack([A_s, A_y])
        if self.rho == 0 or stacked.shape[0] == 0:
            U = np.zeros((self.rho, 0))
        else:
            U = orthonormal_range(stacked.T, self.tol)
        object.__setattr__(self, "A_y", A_y)
        object.__setattr__(self, "A_s", A_s)
        object.__setattr__(self, "label_basis", U)

    @property
    def n_samples(self) -> int:
        return self.Y_centered.shape[1]

    @property
    def rho(self) -> int:
        return self.L_x.shape[1]

    @property
    def y_energy(self) -> float:
        """||Y~^T||_F^2 / n: the target MSE of a constant predictor."""
        return float(np.sum(self.Y_centered ** 2)) / self.n_samples

    @property
    def s_energy(self) -> float:
        return float(np.sum(self.S_centered ** 2)) / self.n_samples

    @cached_property
    def projected_labels(self) -> Tuple[np.ndarray, np.ndarray]:
        """(A_s U, A_y U): the label projections in compressed coordinates."""
        return self.A_s @ self.label_basis, self.A_y @ self.label_basis

    @cached_property
    def label_complement(self) -> np.ndarray:
        """Orthonormal basis of the directions in L_x-coordinates that both label projections annihilate."""
        if self.rho == 0:
            return np.zeros((0, 0))
        if self.label_basis.shape[1] == 0:
            return np.eye(self.rho)
        return null_space_basis(self.label_basis.T, self.tol)


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.5
    max_rank: Optional[int] = None
    eig_negativity_threshold: float = settings.EIG_NEGATIVITY_THRESHOLD
    include_zero_eigenvectors: bool = False

    def __post_init__(self):
        _check_lambda(self.lam)
        if not self.eig_negativity_threshold > 0.0:
            raise InvalidParameter(f"eig_negativity_threshold must be positive, got {self.eig_negativity_threshold}")
        if self.max_rank is not None and self.max_rank < 0:
            raise InvalidParameter(f"max_rank must be non-negative, got {self.max_rank}")

    def with_lambda(self, lam: float) -> "SolverConfig":
        return dataclasses.replace(self, lam=lam)


class Solution(NamedTuple):
    encoder: Encoder
    J_y: float
    J_s: float


def _check_columns(n: int, **matrices):
    for name, m in matrices.items():
        if m.shape[1] != n:
            raise ShapeMismatch(f"{name} has {m.shape[1]} samples, expected {n}")
    if n < 2:
        raise EmptyInput(f"At least 2 samples are required, got {n}")


def build_problem_linear(X, Y, S, tol: RankTolerance = DEFAULT_TOLERANCE) -> Problem:
    """Linear-mode problem: L_x = range(X~^T), recovery factor X~^+."""
    X = _as_rows(X, "X")
    Y = _as_rows(Y, "Y")
    S = _as_rows(S, "S")
    _check_columns(X.shape[1], Y=Y, S=S)
    X_c, x_mean = center_columns(X)
    Y_c, y_mean = center_columns(Y)
    S_c, s_mean = center_columns(S)
    if np.any(X_c):
        L_x = orthonormal_range(X_c.T, tol)
    else:
        L_x = np.zeros((X.shape[1], 0))
    recovery = pseudo_inverse(X_c, tol)
    problem = Problem(
        mode=SolverMode.LINEAR, L_x=L_x, Y_centered=Y_c, S_centered=S_c,
        recovery_factor=recovery, encoder_basis=L_x.T @ recovery,
        x_mean=x_mean, y_mean=y_mean, s_mean=s_mean, tol=tol,
    )
    logger.debug("Linear problem: d=%d n=%d rho=%d", X.shape[0], X.shape[1], problem.rho)
    return problem


def build_problem_kernel(model: KernelModel, Y, S, tol: RankTolerance = DEFAULT_TOLERANCE) -> Problem:
    """Kernel-mode problem: L_x and K~^+ come from one eigendecomposition of the centered Gram matrix."""
    Y = _as_rows(Y, "Y")
    S = _as_rows(S, "S")
    _check_columns(model.n_samples, Y=Y, S=S)
    Y_c, y_mean = center_columns(Y)
    S_c, s_mean = center_columns(S)
    factor = psd_factorization(model.K_centered, tol)
    warn_if_not_psd(factor.smallest_eigenvalue, factor.largest_eigenvalue)
    # L_x holds eigenvectors of K~, so L_x^T K~^+ = diag(1/eigenvalues) L_x^T
    encoder_basis = (factor.basis / factor.eigenvalues).T
    problem = Problem(
        mode=SolverMode.KERNEL, L_x=factor.basis, Y_centered=Y_c, S_centered=S_c,
        recovery_factor=factor.pseudo_inverse, encoder_basis=encoder_basis,
        x_mean=model.train_X.mean(axis=1), y_mean=y_mean, s_mean=s_mean,
        kernel=model, tol=tol,
    )
    logger.debug("Kernel problem (%s): n=%d rho=%d", model.spec.family.value, model.n_samples, problem.rho)
    return problem


def build_B(problem: Problem, lam: float) -> np.ndarray:
    """B = lam (S~ L_x)^T (S~ L_x) - (1 - lam) (Y~ L_x)^T (Y~ L_x), a rho x rho symmetric matrix."""
    _check_lambda(lam)
    B = lam * (problem.A_s.T @ problem.A_s) - (1.0 - lam) * (problem.A_y.T @ problem.A_y)
    return (B + B.T) / 2.0


def build_B_compressed(problem: Problem, lam: float) -> np.ndarray:
    """U^T B U on the label basis U; B = U (U^T B U) U^T."""
    _check_lambda(lam)
    P_s, P_y = problem.projected_labels
    B = lam * (P_s.T @ P_s) - (1.0 - lam) * (P_y.T @ P_y)
    return (B + B.T) / 2.0


def _select(values: np.ndarray, norm: float, config: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Indices of negative eigenvalues (ascending) and of numerically-zero ones."""
    cutoff = config.eig_negativity_threshold * norm
    negative = np.flatnonzero(values < -cutoff)
    zero = np.flatnonzero(np.abs(values) <= cutoff)
    return negative, zero


def _cap(config: SolverConfig, count: int) -> int:
    return count if config.max_rank is None else min(count, config.max_rank)


def spectral_solve(B, config: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenvectors of the negative eigenvalues of B, smallest first.

    gamma = min(max_rank, #{beta < -threshold * ||B||_2}). With
    include_zero_eigenvectors, eigenvectors with |beta| <= threshold * ||B||_2
    are appended until max_rank is reached.
    """
    system = sym_eig(B)
    negative, zero = _select(system.values, system.spectral_norm, config)
    chosen = negative[:_cap(config, negative.size)]
    if config.include_zero_eigenvectors:
        room = _cap(config, negative.size + zero.size) - chosen.size
        chosen = np.concatenate([chosen, zero[:max(room, 0)]])
    return system.vectors[:, chosen], system.values[chosen]


def _spectral_solve_compressed(problem: Problem, config: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    U = problem.label_basis
    system = sym_eig(build_B_compressed(problem, config.lam))
    negative, zero = _select(system.values, system.spectral_norm, config)
    chosen = negative[:_cap(config, negative.size)]
    G_E = U @ system.vectors[:, chosen]
    used = system.values[chosen]
    if config.include_zero_eigenvectors:
        room = _cap(config, problem.rho) - chosen.size
        zero = zero[:max(room, 0)]
        complement = problem.label_complement[:, :max(room - zero.size, 0)]
        G_E = np.hstack([G_E, U @ system.vectors[:, zero], complement])
        used = np.concatenate([used, system.values[zero], np.zeros(complement.shape[1])])
    return G_E, used


def recover_encoder(
    problem: Problem,
    G_E,
    lam: float = 0.0,
    eigenvalues_used: Optional[np.ndarray] = None,
) -> Encoder:
    """
    Minimum-norm encoder for a column-orthonormal G_E.

    Linear mode: Theta_E = G_E^T L_x^T X~^+. Kernel mode: Lambda = G_E^T L_x^T K~^+.
    Without explicit eigenvalues the per-column Rayleigh quotients of B at
    ``lam`` are recorded, so objective_value is always Tr[G_E^T B G_E].
    """
    G_E = np.asarray(G_E, dtype=np.float64)
    if G_E.ndim == 1:
        G_E = G_E.reshape(-1, 1)
    if G_E.ndim != 2 or G_E.shape[0] != problem.rho:
        raise ShapeMismatch(f"G_E must have {problem.rho} rows, got shape {G_E.shape}")
    if eigenvalues_used is None:
        _check_lambda(lam)
        eigenvalues_used = (
            lam * np.sum((problem.A_s @ G_E) ** 2, axis=0)
            - (1.0 - lam) * np.sum((problem.A_y @ G_E) ** 2, axis=0)
        )
    eigenvalues_used = np.asarray(eigenvalues_used, dtype=np.float64)
    if eigenvalues_used.shape != (G_E.shape[1],):
        raise ShapeMismatch("One eigenvalue per column of G_E is required")
    return Encoder(
        mode=problem.mode,
        G_E=G_E,
        params=G_E.T @ problem.encoder_basis,
        lam=float(lam),
        objective_value=float(np.sum(eigenvalues_used)),
        eigenvalues_used=eigenvalues_used,
        x_mean=problem.x_mean,
        kernel=problem.kernel,
    )


def embed(encoder: Encoder, x) -> np.ndarray:
    """
    Map a sample (length d) or a d x m batch to its embedding.

    Linear: z = Theta_E (x - mean_x). Kernel: z = Lambda D (k(x) - K 1/n), the
    kernel vector centered in feature space, so training samples map to the
    columns of G_E^T L_x^T.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = as_matrix(x.reshape(-1, 1) if single else x, "x")
    d = encoder.input_dimension
    if batch.shape[0] != d:
        raise ShapeMismatch(f"Sample dimension {batch.shape[0]} does not match encoder input dimension {d}")
    if encoder.mode == SolverMode.LINEAR:
        Z = encoder.params @ (batch - encoder.x_mean[:, None])
    else:
        k = kernel_vector(encoder.kernel, batch) - encoder.kernel.column_means[:, None]
        Z = encoder.params @ (k - k.mean(axis=0, keepdims=True))
    return Z[:, 0] if single else Z


def objectives(problem: Problem, G_E) -> Tuple[float, float]:
    """J_y, J_s: minimum MSE of linear target/adversary regressors on the embedding G_E^T L_x^T."""
    G_E = np.asarray(G_E, dtype=np.float64)
    if G_E.ndim == 1:
        G_E = G_E.reshape(-1, 1)
    if G_E.shape[0] != problem.rho:
        raise ShapeMismatch(f"G_E must have {problem.rho} rows, got shape {G_E.shape}")
    n = problem.n_samples
    J_y = problem.y_energy - float(np.sum((problem.A_y @ G_E) ** 2)) / n
    J_s = problem.s_energy - float(np.sum((problem.A_s @ G_E) ** 2)) / n
    return J_y, J_s


def solve(problem: Problem, config: SolverConfig) -> Solution:
    """Global optimum of min (1 - lam) J_y - lam J_s for one lam."""
    G_E, used = _spectral_solve_compressed(problem, config)
    encoder = recover_encoder(problem, G_E, lam=config.lam, eigenvalues_used=used)
    J_y, J_s = objectives(problem, G_E)
    logger.debug("lambda=%.6g r=%d J_y=%.6g J_s=%.6g", config.lam, encoder.r, J_y, J_s)
    return Solution(encoder=encoder, J_y=J_y, J_s=J_s)


def feature_weights(encoder: Encoder, names: Optional[List[str]] = None) -> Dict[str, float]:
    """Column norms of Theta_E: how strongly each input feature drives the embedding."""
    if encoder.mode != SolverMode.LINEAR:
        raise InvalidParameter("Feature weights are only defined for linear encoders")
    d = encoder.params.shape[1]
    names = names or [f"x{i + 1}" for i in range(d)]
    if len(names) != d:
        raise ShapeMismatch(f"Expected {d} feature names, got {len(names)}")
    norms = np.linalg.norm(encoder.params, axis=0) if encoder.r else np.zeros(d)
    return {name: float(w) for name, w in zip(names, norms)}
