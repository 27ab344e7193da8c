"""
Bounds - analytically attainable extremes of target and adversary MSE.
"""
from dataclasses import dataclass, field

import numpy as np

from app.engine.numerics import DEFAULT_TOLERANCE, RankTolerance, null_space_basis, orthonormal_range
from app.engine.solver import Problem


@dataclass(frozen=True)
class Bounds:
    """
    gamma_min: best target MSE of any encoder (full projection onto L_x).
    gamma_max: target MSE of the best encoder that leaks nothing linear about s (V_s).
    alpha_min: adversary MSE of the encoder spanned by the target directions (V_y).
    alpha_max: adversary MSE of the zero encoder.
    alpha_star_min: adversary MSE of the full projection; no encoder leaks more.
    """
    gamma_min: float
    gamma_max: float
    alpha_min: float
    alpha_max: float
    alpha_star_min: float
    V_s: np.ndarray = field(repr=False)
    V_y: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "gamma_min": self.gamma_min,
            "gamma_max": self.gamma_max,
            "alpha_min": self.alpha_min,
            "alpha_max": self.alpha_max,
            "alpha_star_min": self.alpha_star_min,
        }

    def contains_alpha(self, alpha: float, slack: float = 0.0) -> bool:
        return self.alpha_min - slack <= alpha <= self.alpha_max + slack


def compute_bounds(problem: Problem, tol: RankTolerance = DEFAULT_TOLERANCE) -> Bounds:
    """
    V_s: right singular vectors of S~ L_x with zero singular value.
    V_y: right singular vectors of Y~ L_x with nonzero singular value.
    """
    n = problem.n_samples
    ty, ts = problem.y_energy, problem.s_energy
    if problem.rho == 0:
        V_s = np.zeros((0, 0))
        V_y = np.zeros((0, 0))
    else:
        V_s = null_space_basis(problem.A_s, tol)
        V_y = orthonormal_range(problem.A_y.T, tol) if problem.A_y.size else np.zeros((problem.rho, 0))

    def energy(M: np.ndarray) -> float:
        return float(np.sum(M ** 2)) / n

    gamma_min = ty - energy(problem.A_y)
    gamma_max = ty - energy(problem.A_y @ V_s)
    alpha_min = ts - energy(problem.A_s @ V_y)
    alpha_star_min = ts - energy(problem.A_s)
    return Bounds(
        gamma_min=gamma_min,
        gamma_max=max(gamma_max, gamma_min),
        alpha_min=min(alpha_min, ts),
        alpha_max=ts,
        alpha_star_min=min(alpha_star_min, alpha_min),
        V_s=V_s,
        V_y=V_y,
    )
