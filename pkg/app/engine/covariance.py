"""
Covariance path - the solver expressed through second moments and a Cholesky factor of C_x.

Used to cross-check the empirical path: on the same data its B has the
empirical spectrum scaled by 1/n, and min_mse_given_encoder gives the closed
form MSE of the best linear regressor on any linear embedding.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sp_linalg

from app.engine.numerics import DEFAULT_TOLERANCE, RankTolerance, as_matrix, center_columns, cholesky, orthonormal_range
from app.errors import EmptyInput, InvalidLambda, InvalidParameter, ShapeMismatch

TARGETS = ("y", "s", "x")


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    C_x: np.ndarray  # d x d, positive definite
    C_xy: np.ndarray  # d x p
    C_xs: np.ndarray  # d x q
    C_y: np.ndarray
    C_s: np.ndarray
    Q_x: np.ndarray  # upper triangular, Q_x^T Q_x = C_x
    x_mean: np.ndarray
    y_mean: np.ndarray
    s_mean: np.ndarray
    whitened_y: np.ndarray = field(init=False, repr=False)  # Q_x^-T C_xy
    whitened_s: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "whitened_y", self.whiten(self.C_xy))
        object.__setattr__(self, "whitened_s", self.whiten(self.C_xs))

    def whiten(self, C: np.ndarray) -> np.ndarray:
        return sp_linalg.solve_triangular(self.Q_x, C, trans="T", lower=False)

    @property
    def dimension(self) -> int:
        return self.C_x.shape[0]

    def cross(self, target: str) -> np.ndarray:
        return {"y": self.C_xy, "s": self.C_xs, "x": self.C_x}[target]

    def auto(self, target: str) -> np.ndarray:
        return {"y": self.C_y, "s": self.C_s, "x": self.C_x}[target]


def _rows(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    return as_matrix(arr.reshape(1, -1) if arr.ndim == 1 else arr, name)


def build_covariance(X, Y, S, tol: RankTolerance = DEFAULT_TOLERANCE) -> CovarianceModel:
    """Empirical moments with 1/n normalization; raises NotPositiveDefinite for a singular C_x."""
    X, Y, S = _rows(X, "X"), _rows(Y, "Y"), _rows(S, "S")
    n = X.shape[1]
    if Y.shape[1] != n or S.shape[1] != n:
        raise ShapeMismatch("X, Y and S must share a sample count")
    if n < 2:
        raise EmptyInput(f"At least 2 samples are required, got {n}")
    X_c, x_mean = center_columns(X)
    Y_c, y_mean = center_columns(Y)
    S_c, s_mean = center_columns(S)
    C_x = X_c @ X_c.T / n
    return CovarianceModel(
        C_x=C_x,
        C_xy=X_c @ Y_c.T / n,
        C_xs=X_c @ S_c.T / n,
        C_y=Y_c @ Y_c.T / n,
        C_s=S_c @ S_c.T / n,
        Q_x=cholesky(C_x, tol),
        x_mean=x_mean,
        y_mean=y_mean,
        s_mean=s_mean,
    )


def build_B_covariance(cov: CovarianceModel, lam: float) -> np.ndarray:
    """B = Q_x^-T (lam C_xs C_sx - (1 - lam) C_xy C_yx) Q_x^-1 with L_x = I (C_x has full rank)."""
    if not (0.0 <= lam <= 1.0):
        raise InvalidLambda(lam)
    W_s, W_y = cov.whitened_s, cov.whitened_y
    B = lam * (W_s @ W_s.T) - (1.0 - lam) * (W_y @ W_y.T)
    return (B + B.T) / 2.0


def encoder_from_covariance(cov: CovarianceModel, G_E) -> np.ndarray:
    """Theta_E = G_E^T Q_x^-T, so that Q_x Theta_E^T = G_E."""
    G_E = np.asarray(G_E, dtype=np.float64)
    if G_E.ndim == 1:
        G_E = G_E.reshape(-1, 1)
    if G_E.shape[0] != cov.dimension:
        raise ShapeMismatch(f"G_E must have {cov.dimension} rows, got shape {G_E.shape}")
    return sp_linalg.solve_triangular(cov.Q_x, G_E, lower=False).T


def min_mse_given_encoder(cov: CovarianceModel, Theta_E, target: str = "y") -> float:
    """
    Smallest MSE of a linear regressor (with bias) predicting ``target`` from z = Theta_E x.

    Tr[C_t] - ||P_M Q_x^-T C_xt||_F^2 with M = Q_x Theta_E^T.
    """
    if target not in TARGETS:
        raise InvalidParameter(f"target must be one of {TARGETS}, got {target!r}")
    Theta_E = np.asarray(Theta_E, dtype=np.float64)
    if Theta_E.ndim == 1:
        Theta_E = Theta_E.reshape(1, -1)
    if Theta_E.shape[1] != cov.dimension:
        raise ShapeMismatch(f"Theta_E must have {cov.dimension} columns, got shape {Theta_E.shape}")
    total = float(np.trace(cov.auto(target)))
    if Theta_E.shape[0] == 0 or not np.any(Theta_E):
        return total
    basis = orthonormal_range(cov.Q_x @ Theta_E.T)
    explained = basis.T @ cov.whiten(cov.cross(target))
    return total - float(np.sum(explained ** 2))
