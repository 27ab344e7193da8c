"""
Dataset ingestion - CSV files (rows = samples) to column-sample matrices, plus one-hot and splits.
"""
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from app.config import settings
from app.errors import EmptyInput, InvalidLabel, InvalidParameter, InvalidSplit, MissingValue, ParseError, SchemaError
from app.models.dataset import Dataset, FeatureEncoding

logger = logging.getLogger(__name__)


class ColumnRole(str, Enum):
    FEATURE = "feature"
    TARGET = "target"
    SENSITIVE = "sensitive"
    IGNORE = "ignore"


class ColumnEncoding(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL_ONEHOT = "categorical-onehot"
    BINARY_THRESHOLD = "binary-threshold"  # 1 when value > threshold


class ColumnSpec(BaseModel):
    name: str
    role: ColumnRole
    encoding: ColumnEncoding = ColumnEncoding.NUMERIC
    threshold: Optional[float] = None
    value_map: Dict[str, str] = Field(default_factory=dict)  # raw cell -> replacement, applied before parsing

    @model_validator(mode="after")
    def _threshold_matches_encoding(self):
        if self.encoding == ColumnEncoding.BINARY_THRESHOLD and self.threshold is None:
            raise ValueError(f"Column '{self.name}' uses binary-threshold encoding but has no threshold")
        return self


class DatasetSpec(BaseModel):
    columns: List[ColumnSpec]
    standardize: bool = False  # numeric features only
    drop_missing: bool = False
    na_values: List[str] = Field(default_factory=list)
    skip_initial_space: bool = False

    @model_validator(mode="after")
    def _roles_present(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("Column names in a dataset spec must be unique")
        for role in (ColumnRole.FEATURE, ColumnRole.TARGET, ColumnRole.SENSITIVE):
            if not any(c.role == role for c in self.columns):
                raise ValueError(f"Dataset spec needs at least one {role.value} column")
        return self

    def by_role(self, role: ColumnRole) -> List[ColumnSpec]:
        return [c for c in self.columns if c.role == role]


class SplitSpec(BaseModel):
    """Either a train fraction of one file, or an explicit train/test file pair."""
    train_fraction: Optional[float] = None
    seed: int = 0
    train_path: Optional[str] = None
    test_path: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        explicit = self.train_path is not None or self.test_path is not None
        if explicit and (self.train_path is None or self.test_path is None):
            raise ValueError("An explicit split needs both train_path and test_path")
        if explicit and self.train_fraction is not None:
            raise ValueError("Give either train_fraction or a train/test file pair, not both")
        return self


def load_dataset_spec(path) -> DatasetSpec:
    """Read a JSON dataset spec (column name -> role/encoding)."""
    with open(path, encoding="utf-8") as f:
        return DatasetSpec.model_validate(json.load(f))


def one_hot(labels, classes: int) -> np.ndarray:
    """classes x n indicator matrix; every column sums to one."""
    labels = np.asarray(labels)
    if classes < 1:
        raise InvalidParameter(f"classes must be at least 1, got {classes}")
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise InvalidLabel(f"Labels must lie in [0, {classes}), got range [{labels.min()}, {labels.max()}]")
    encoded = np.zeros((classes, labels.size))
    encoded[labels.astype(np.int64), np.arange(labels.size)] = 1.0
    return encoded


# ================================================================
# CSV LOADING
# ================================================================

def _missing_mask(frame: pd.DataFrame, na_values: List[str]) -> pd.DataFrame:
    stripped = frame.apply(lambda col: col.str.strip())
    return (stripped == "") | stripped.isin(na_values)


def _parse_numeric(values: pd.Series, column: str) -> np.ndarray:
    stripped = values.str.strip()
    try:
        parsed = stripped.to_numpy().astype(np.float64)
    except ValueError:
        parsed = pd.to_numeric(stripped, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(parsed))
    if bad.size:
        i = int(bad[0])
        raise ParseError(row=int(values.index[i]) + 1, column=column, value=values.iloc[i])
    return parsed


class _Encoder:
    """Column-by-column encoder that records (or reuses) categories and standardization stats."""

    def __init__(self, spec: DatasetSpec, reference: Optional[FeatureEncoding]):
        self.spec = spec
        self.reference = reference
        self.categories: Dict[str, List[str]] = {}
        self.standardization: Dict[str, Tuple[float, float]] = {}

    def encode(self, frame: pd.DataFrame, column: ColumnSpec) -> Tuple[np.ndarray, List[str], Optional[np.ndarray]]:
        """Rows for one column, their names, and class labels when the column is a class variable."""
        values = frame[column.name]
        if column.encoding == ColumnEncoding.CATEGORICAL_ONEHOT:
            stripped = values.str.strip()
            if self.reference is not None and column.name in self.reference.categories:
                categories = self.reference.categories[column.name]
            else:
                categories = sorted(stripped.unique().tolist())
            self.categories[column.name] = categories
            index = {cat: i for i, cat in enumerate(categories)}
            labels = stripped.map(index)
            unknown = np.flatnonzero(labels.isna().to_numpy())
            if unknown.size:
                i = int(unknown[0])
                raise ParseError(row=int(values.index[i]) + 1, column=column.name, value=values.iloc[i])
            labels = labels.to_numpy(dtype=np.int64)
            names = [f"{column.name}={cat}" for cat in categories]
            return one_hot(labels, len(categories)), names, labels

        parsed = _parse_numeric(values, column.name)
        if column.encoding == ColumnEncoding.BINARY_THRESHOLD:
            labels = (parsed > column.threshold).astype(np.int64)
            return labels[None, :].astype(np.float64), [f"{column.name}>{column.threshold:g}"], labels

        if self.spec.standardize and column.role == ColumnRole.FEATURE:
            if self.reference is not None and column.name in self.reference.standardization:
                mean, std = self.reference.standardization[column.name]
            else:
                mean, std = float(parsed.mean()), float(parsed.std())
                std = std if std > 0 else 1.0
            self.standardization[column.name] = (mean, std)
            parsed = (parsed - mean) / std
        return parsed[None, :], [column.name], None

    def encode_role(self, frame: pd.DataFrame, role: ColumnRole) -> Tuple[np.ndarray, List[str], Optional[np.ndarray]]:
        blocks, names, labels = [], [], []
        for column in self.spec.by_role(role):
            block, block_names, block_labels = self.encode(frame, column)
            blocks.append(block)
            names.extend(block_names)
            labels.append(block_labels)
        # Class labels are only meaningful for a single class-valued column
        class_labels = labels[0] if len(labels) == 1 else None
        return np.vstack(blocks), names, class_labels

    @property
    def fitted(self) -> FeatureEncoding:
        return FeatureEncoding(categories=self.categories, standardization=self.standardization)


def load_csv(path, spec: DatasetSpec, reference: Optional[Dataset] = None) -> Dataset:
    """
    Load a UTF-8 CSV with a header row into a Dataset.

    Categorical columns are one-hot expanded; numeric features are
    standardized when the spec asks for it. Passing the training Dataset as
    ``reference`` reuses its categories and standardization statistics.
    Missing cells raise MissingValue unless ``drop_missing`` removes their rows.
    """
    frame = pd.read_csv(
        path, dtype=str, keep_default_na=False, encoding="utf-8",
        skipinitialspace=spec.skip_initial_space,
    )
    used = [c for c in spec.columns if c.role != ColumnRole.IGNORE]
    absent = [c.name for c in used if c.name not in frame.columns]
    if absent:
        raise SchemaError(f"Columns missing from {path}: {', '.join(absent)}")
    if frame.empty:
        raise EmptyInput(f"{path} has a header but no rows")

    frame = frame[[c.name for c in used]].copy()
    for column in used:
        if column.value_map:
            frame[column.name] = frame[column.name].map(lambda v, m=column.value_map: m.get(v.strip(), v))

    missing = _missing_mask(frame, spec.na_values)
    if missing.to_numpy().any():
        if not spec.drop_missing:
            row, col = np.argwhere(missing.to_numpy())[0]
            raise MissingValue(row=int(row) + 1, column=frame.columns[col])
        keep = ~missing.any(axis=1)
        logger.warning("Dropping %d of %d rows with missing values from %s", int((~keep).sum()), len(frame), path)
        # index stays the data-row position in the file
        frame = frame[keep]
        if frame.empty:
            raise EmptyInput(f"No complete rows left in {path}")

    encoder = _Encoder(spec, reference.encoding if reference is not None else None)
    X, feature_names, _ = encoder.encode_role(frame, ColumnRole.FEATURE)
    Y, target_names, y_labels = encoder.encode_role(frame, ColumnRole.TARGET)
    S, sensitive_names, s_labels = encoder.encode_role(frame, ColumnRole.SENSITIVE)
    dataset = Dataset(
        X=X, Y=Y, S=S,
        feature_names=feature_names, target_names=target_names, sensitive_names=sensitive_names,
        y_labels=y_labels, s_labels=s_labels, encoding=encoder.fitted,
    )
    logger.info("Loaded %s: %r", path, dataset)
    return dataset


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    """Row-sample frame of the encoded matrices, one column per matrix row."""
    matrix = np.vstack([dataset.X, dataset.Y, dataset.S]).T
    names = list(dataset.feature_names) + list(dataset.target_names) + list(dataset.sensitive_names)
    return pd.DataFrame(matrix, columns=names)


def numeric_spec(dataset: Dataset) -> DatasetSpec:
    """Spec that reads a write_csv file back into the same matrices."""
    columns = (
        [ColumnSpec(name=n, role=ColumnRole.FEATURE) for n in dataset.feature_names]
        + [ColumnSpec(name=n, role=ColumnRole.TARGET) for n in dataset.target_names]
        + [ColumnSpec(name=n, role=ColumnRole.SENSITIVE) for n in dataset.sensitive_names]
    )
    return DatasetSpec(columns=columns)


def write_csv(path, dataset: Dataset):
    """Write the encoded matrices, samples as rows, with 17 significant digits."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    dataset_frame(dataset).to_csv(path, index=False, float_format=settings.FLOAT_FORMAT)


# ================================================================
# SPLITS
# ================================================================

def split(dataset: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Seeded shuffle-split; both parts keep the original sample order."""
    if spec.train_fraction is None:
        raise InvalidSplit("A fraction split needs train_fraction")
    if not 0.0 < spec.train_fraction < 1.0:
        raise InvalidSplit(f"train_fraction must lie in (0, 1), got {spec.train_fraction}")
    n = dataset.n_samples
    n_train = int(round(spec.train_fraction * n))
    if n_train == 0 or n_train == n:
        raise InvalidSplit(f"train_fraction {spec.train_fraction} leaves an empty side for n={n}")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    order = rng.permutation(n)
    return dataset.subset(np.sort(order[:n_train])), dataset.subset(np.sort(order[n_train:]))


def load_train_test(spec: DatasetSpec, split_spec: SplitSpec, data_path=None) -> Tuple[Dataset, Dataset]:
    """Resolve a SplitSpec: an explicit file pair (test encoded like train) or a split of one file."""
    if split_spec.train_path is not None:
        train = load_csv(split_spec.train_path, spec)
        return train, load_csv(split_spec.test_path, spec, reference=train)
    if data_path is None:
        raise InvalidSplit("A fraction split needs a data file")
    return split(load_csv(data_path, spec), split_spec)
