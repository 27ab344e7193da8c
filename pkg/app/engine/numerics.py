"""
Numerics - dense real-matrix primitives with explicit rank/tolerance contracts.

All matrices are float64 numpy arrays. Samples are columns (X is d x n).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg as sp_linalg

from app.config import settings
from app.errors import EmptyInput, InvalidParameter, NonFiniteInput, NotPositiveDefinite, ShapeMismatch


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value cutoff used to decide numerical rank."""
    relative_cutoff: float = settings.RANK_CUTOFF

    def __post_init__(self):
        if not 0.0 < self.relative_cutoff < 1.0:
            raise InvalidParameter(f"relative_cutoff must lie in (0, 1), got {self.relative_cutoff}")


DEFAULT_TOLERANCE = RankTolerance()


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues sorted ascending; column k of `vectors` pairs with values[k]."""
    values: np.ndarray
    vectors: np.ndarray

    @property
    def spectral_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class PsdFactorization:
    """Range basis and pseudo-inverse of a symmetric PSD matrix from one eigendecomposition."""
    basis: np.ndarray
    eigenvalues: np.ndarray  # kept eigenvalues, ascending, all above the cutoff
    pseudo_inverse: np.ndarray
    smallest_eigenvalue: float = 0.0
    largest_eigenvalue: float = 0.0

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array and reject NaN/Inf."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got {m.ndim} dimensions")
    if not np.all(np.isfinite(m)):
        raise NonFiniteInput(f"{name} contains NaN or Inf entries")
    return m


def _require_square(m: np.ndarray, name: str):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got shape {m.shape}")


def center_columns(X) -> Tuple[np.ndarray, np.ndarray]:
    """
    Subtract the per-row mean: X_centered = X D with D = I - (1/n) 1 1^T.

    Returns (X_centered, mean) where mean has one entry per row of X.
    """
    X = as_matrix(X, "X")
    if X.shape[1] == 0:
        raise EmptyInput("Cannot center a matrix with zero columns")
    mean = X.mean(axis=1)
    return X - mean[:, None], mean


def orthonormal_range(M, tol: RankTolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Orthonormal basis for the column space of M.

    The column count equals the numerical rank: singular values above
    relative_cutoff * largest singular value. An all-zero M yields a basis
    with zero columns.
    """
    M = as_matrix(M, "M")
    if M.size == 0:
        raise EmptyInput(f"Cannot take the range of an empty {M.shape} matrix")
    U, s, _ = sp_linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[0], 0))
    rank = int(np.count_nonzero(s > tol.relative_cutoff * s[0]))
    return U[:, :rank]


def null_space_basis(M, tol: RankTolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the right null space of M (complement of its row space)."""
    M = as_matrix(M, "M")
    if M.shape[1] == 0:
        return np.zeros((0, 0))
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(M.shape[1])
    return sp_linalg.null_space(M, rcond=tol.relative_cutoff)


def sym_eig(B) -> EigenSystem:
    """Eigendecomposition of a symmetric matrix; B is symmetrized as (B + B^T)/2 first."""
    B = as_matrix(B, "B")
    _require_square(B, "B")
    if B.shape[0] == 0:
        return EigenSystem(values=np.zeros(0), vectors=np.zeros((0, 0)))
    values, vectors = sp_linalg.eigh((B + B.T) / 2.0)
    return EigenSystem(values=values, vectors=vectors)


def pseudo_inverse(M, tol: RankTolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with the relative rank cutoff."""
    M = as_matrix(M, "M")
    if M.size == 0:
        return np.zeros((M.shape[1], M.shape[0]))
    return sp_linalg.pinv(M, atol=0.0, rtol=tol.relative_cutoff)


def psd_factorization(K, tol: RankTolerance = DEFAULT_TOLERANCE) -> PsdFactorization:
    """
    Range basis and pseudo-inverse of a symmetric PSD matrix from a single
    eigendecomposition. Eigenvalues at or below relative_cutoff * largest
    (including small negative round-off) are treated as zero.
    """
    K = as_matrix(K, "K")
    _require_square(K, "K")
    n = K.shape[0]
    if n == 0:
        raise EmptyInput("Cannot factor an empty matrix")
    system = sym_eig(K)
    largest = system.values[-1]
    if largest <= 0.0:
        return PsdFactorization(
            basis=np.zeros((n, 0)), eigenvalues=np.zeros(0), pseudo_inverse=np.zeros((n, n)),
            smallest_eigenvalue=float(system.values[0]), largest_eigenvalue=float(largest),
        )
    keep = system.values > tol.relative_cutoff * largest
    basis = system.vectors[:, keep]
    kept = system.values[keep]
    pinv = (basis / kept) @ basis.T
    return PsdFactorization(
        basis=basis, eigenvalues=kept, pseudo_inverse=pinv,
        smallest_eigenvalue=float(system.values[0]), largest_eigenvalue=float(largest),
    )


def cholesky(C, tol: RankTolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Upper-triangular factor Q with Q^T Q = C.

    Raises NotPositiveDefinite (carrying the smallest eigenvalue) when the
    smallest eigenvalue is not above relative_cutoff * largest.
    """
    C = as_matrix(C, "C")
    _require_square(C, "C")
    if C.shape[0] == 0:
        raise EmptyInput("Cannot factor an empty matrix")
    C = (C + C.T) / 2.0
    eigenvalues = sp_linalg.eigvalsh(C)
    smallest, largest = float(eigenvalues[0]), float(eigenvalues[-1])
    if largest <= 0.0 or smallest <= tol.relative_cutoff * largest:
        raise NotPositiveDefinite(smallest)
    try:
        return sp_linalg.cholesky(C, lower=False)
    except sp_linalg.LinAlgError:
        raise NotPositiveDefinite(smallest)
