"""
Dataset model - column-sample matrices for features, targets and sensitive attributes.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.errors import EmptyInput, ShapeMismatch


@dataclass(frozen=True)
class FeatureEncoding:
    """Encoding state fitted on a training file and reused for its test file."""
    categories: Dict[str, List[str]] = field(default_factory=dict)  # column -> ordered categories
    standardization: Dict[str, Tuple[float, float]] = field(default_factory=dict)  # column -> (mean, std)

    def to_dict(self) -> dict:
        return {
            "categories": self.categories,
            "standardization": {k: list(v) for k, v in self.standardization.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureEncoding":
        return cls(
            categories={k: list(v) for k, v in d.get("categories", {}).items()},
            standardization={k: (float(v[0]), float(v[1])) for k, v in d.get("standardization", {}).items()},
        )


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray  # d x n features
    Y: np.ndarray  # p x n targets (one-hot or real)
    S: np.ndarray  # q x n sensitive attributes
    feature_names: List[str] = field(default_factory=list)
    target_names: List[str] = field(default_factory=list)
    sensitive_names: List[str] = field(default_factory=list)
    y_labels: Optional[np.ndarray] = None  # class indices when the target is one categorical column
    s_labels: Optional[np.ndarray] = None
    encoding: FeatureEncoding = field(default_factory=FeatureEncoding)
    x_mean: np.ndarray = field(init=False)
    y_mean: np.ndarray = field(init=False)
    s_mean: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.X.shape[1]
        if self.Y.shape[1] != n or self.S.shape[1] != n:
            raise ShapeMismatch(
                f"X, Y and S must share a sample count, got {n}, {self.Y.shape[1]} and {self.S.shape[1]}"
            )
        for labels, name in ((self.y_labels, "y_labels"), (self.s_labels, "s_labels")):
            if labels is not None and labels.shape != (n,):
                raise ShapeMismatch(f"{name} must have one entry per sample")
        if n == 0:
            raise EmptyInput("Dataset has no samples")
        object.__setattr__(self, "x_mean", self.X.mean(axis=1))
        object.__setattr__(self, "y_mean", self.Y.mean(axis=1))
        object.__setattr__(self, "s_mean", self.S.mean(axis=1))

    @property
    def n_samples(self) -> int:
        return self.X.shape[1]

    @property
    def dimension(self) -> int:
        return self.X.shape[0]

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Dataset restricted to the given sample indices, in that order."""
        return Dataset(
            X=self.X[:, indices],
            Y=self.Y[:, indices],
            S=self.S[:, indices],
            feature_names=list(self.feature_names),
            target_names=list(self.target_names),
            sensitive_names=list(self.sensitive_names),
            y_labels=None if self.y_labels is None else self.y_labels[indices],
            s_labels=None if self.s_labels is None else self.s_labels[indices],
            encoding=self.encoding,
        )

    def __repr__(self):
        return f"<Dataset d={self.dimension} p={self.Y.shape[0]} q={self.S.shape[0]} n={self.n_samples}>"
