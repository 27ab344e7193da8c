"""
Synthetic data - the four-component Gaussian mixture and scalar data with exact sample correlations.
"""
from typing import List

import numpy as np
import pandas as pd

from app.datasets import ColumnEncoding, ColumnRole, ColumnSpec, DatasetSpec, one_hot
from app.errors import InvalidCount, InvalidParameter
from app.models.dataset import Dataset


def make_rng(seed: int) -> np.random.Generator:
    """The seedable generator used for every synthetic draw (algorithm recorded as settings.RNG_ALGORITHM)."""
    return np.random.Generator(np.random.PCG64(seed))


class MixtureGenerator:
    """Four isotropic Gaussians in R^3; shape is the target, color the sensitive attribute."""

    SIGMA = 0.3
    SHAPES = ["circle", "cross"]
    COLORS = ["blue", "red"]

    # (mean, shape, color)
    COMPONENTS = [
        ((1.0, 1.0, 0.0), "circle", "blue"),
        ((2.0, 2.0, 0.0), "circle", "red"),
        ((2.0, 2.5, 0.0), "cross", "blue"),
        ((2.5, 3.0, 0.0), "cross", "red"),
    ]

    FEATURES = ["x1", "x2", "x3"]

    @classmethod
    def generate(cls, n: int, seed: int = 0) -> Dataset:
        """n samples, n/4 per component, in a seeded random order."""
        if n <= 0 or n % len(cls.COMPONENTS) != 0:
            raise InvalidCount(f"n must be a positive multiple of {len(cls.COMPONENTS)}, got {n}")
        rng = make_rng(seed)
        per_component = n // len(cls.COMPONENTS)

        blocks, shapes, colors = [], [], []
        for mean, shape, color in cls.COMPONENTS:
            blocks.append(np.asarray(mean)[:, None] + cls.SIGMA * rng.standard_normal((3, per_component)))
            shapes.extend([cls.SHAPES.index(shape)] * per_component)
            colors.extend([cls.COLORS.index(color)] * per_component)

        order = rng.permutation(n)
        X = np.hstack(blocks)[:, order]
        y_labels = np.asarray(shapes, dtype=np.int64)[order]
        s_labels = np.asarray(colors, dtype=np.int64)[order]
        return Dataset(
            X=X,
            Y=one_hot(y_labels, len(cls.SHAPES)),
            S=one_hot(s_labels, len(cls.COLORS)),
            feature_names=list(cls.FEATURES),
            target_names=[f"shape={s}" for s in cls.SHAPES],
            sensitive_names=[f"color={c}" for c in cls.COLORS],
            y_labels=y_labels,
            s_labels=s_labels,
        )

    @classmethod
    def to_frame(cls, dataset: Dataset) -> pd.DataFrame:
        """Row-sample frame with categorical shape/color columns."""
        frame = pd.DataFrame(dataset.X.T, columns=cls.FEATURES)
        frame["shape"] = [cls.SHAPES[i] for i in dataset.y_labels]
        frame["color"] = [cls.COLORS[i] for i in dataset.s_labels]
        return frame

    @classmethod
    def dataset_spec(cls) -> DatasetSpec:
        columns: List[ColumnSpec] = [ColumnSpec(name=f, role=ColumnRole.FEATURE) for f in cls.FEATURES]
        columns.append(ColumnSpec(name="shape", role=ColumnRole.TARGET, encoding=ColumnEncoding.CATEGORICAL_ONEHOT))
        columns.append(ColumnSpec(name="color", role=ColumnRole.SENSITIVE, encoding=ColumnEncoding.CATEGORICAL_ONEHOT))
        return DatasetSpec(columns=columns)


def _unit_direction(v: np.ndarray, against: List[np.ndarray]) -> np.ndarray:
    """Center v, remove its components along the (orthonormal) vectors in ``against``, normalize."""
    v = v - v.mean()
    for u in against:
        v = v - (u @ v) * u
    return v / np.linalg.norm(v)


def generate_correlated_scalars(n: int, rho_xy: float, rho_xs: float, seed: int = 0) -> Dataset:
    """
    Scalar x, y, s with unit sample variance and sample correlations exactly
    rho_xy (x with y) and rho_xs (x with s), up to round-off.
    """
    if n < 3:
        raise InvalidCount(f"At least 3 samples are required, got {n}")
    for name, rho in (("rho_xy", rho_xy), ("rho_xs", rho_xs)):
        if not -1.0 <= rho <= 1.0:
            raise InvalidParameter(f"{name} must lie in [-1, 1], got {rho}")
    rng = make_rng(seed)
    draws = rng.standard_normal((3, n))
    x = _unit_direction(draws[0], [])
    e_y = _unit_direction(draws[1], [x])
    e_s = _unit_direction(draws[2], [x])
    scale = np.sqrt(n)
    y = rho_xy * x + np.sqrt(1.0 - rho_xy ** 2) * e_y
    s = rho_xs * x + np.sqrt(1.0 - rho_xs ** 2) * e_s
    return Dataset(
        X=scale * x[None, :],
        Y=scale * y[None, :],
        S=scale * s[None, :],
        feature_names=["x"],
        target_names=["y"],
        sensitive_names=["s"],
    )
