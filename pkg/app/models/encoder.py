"""
Encoder model - the learned map x -> z for linear and kernel modes.
"""
import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.engine.kernels import KernelModel


class SolverMode(enum.Enum):
    LINEAR = "linear"
    KERNEL = "kernel"


@dataclass(frozen=True)
class Encoder:
    mode: SolverMode
    G_E: np.ndarray  # rho x r, orthonormal columns
    params: np.ndarray  # Theta_E (r x d) in linear mode, Lambda (r x n) in kernel mode
    lam: float
    objective_value: float  # Tr[G_E^T B G_E] = sum of eigenvalues_used
    eigenvalues_used: np.ndarray
    x_mean: np.ndarray  # training feature mean (linear-mode centering)
    kernel: Optional[KernelModel] = field(default=None, repr=False)

    @property
    def r(self) -> int:
        return self.params.shape[0]

    @property
    def input_dimension(self) -> int:
        return self.x_mean.shape[0]

    def to_dict(self) -> dict:
        """Scalar metadata; matrices are written separately by app.storage."""
        return {
            "mode": self.mode.value,
            "r": self.r,
            "lambda": self.lam,
            "objective_value": self.objective_value,
            "eigenvalues_used": [float(v) for v in self.eigenvalues_used],
            "x_mean": [float(v) for v in self.x_mean],
            "params_shape": list(self.params.shape),
            "kernel": None if self.kernel is None else {
                **self.kernel.spec.to_dict(),
                "resolved_bandwidth": self.kernel.resolved_bandwidth,
                "n_train": self.kernel.n_samples,
            },
        }

    def __repr__(self):
        return f"<Encoder {self.mode.value} r={self.r} lambda={self.lam:.4g}>"
