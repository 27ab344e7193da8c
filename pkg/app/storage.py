"""
Run artifacts - encoder files, embedding CSVs, trade-off tables and JSON reports.

An encoder is stored as ``<stem>.json`` (mode, lambda, means, shapes, kernel
spec) next to ``<stem>.params.csv`` (one row per embedding dimension),
``<stem>.basis.csv`` (G_E transposed) and, in kernel mode,
``<stem>.train_features.csv`` (training samples as rows).
"""
import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from app.config import settings
from app.engine.kernels import KernelSpec, fit_kernel_model
from app.errors import ArtifactError
from app.models.encoder import Encoder, SolverMode
from app.models.tradeoff import TradeoffPoint

logger = logging.getLogger(__name__)

ARTIFACT_VERSION = 1


def _write_matrix(path: Path, matrix: np.ndarray, prefix: str):
    columns = [f"{prefix}{i + 1}" for i in range(matrix.shape[1])]
    pd.DataFrame(matrix, columns=columns).to_csv(path, index=False, float_format=settings.FLOAT_FORMAT)


def _read_matrix(path: Path, shape: Tuple[int, int]) -> np.ndarray:
    if 0 in shape:
        return np.zeros(shape)
    try:
        matrix = pd.read_csv(path, float_precision="round_trip").to_numpy(dtype=np.float64)
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise ArtifactError(f"Cannot read matrix file {path}: {e}")
    if matrix.shape != tuple(shape):
        raise ArtifactError(f"{path} holds a {matrix.shape} matrix, expected {tuple(shape)}")
    return matrix


def _stem_paths(path) -> dict:
    path = Path(path)
    stem = path.with_suffix("") if path.suffix == ".json" else path
    return {
        "meta": stem.with_suffix(".json"),
        "params": Path(f"{stem}.params.csv"),
        "basis": Path(f"{stem}.basis.csv"),
        "train": Path(f"{stem}.train_features.csv"),
    }


def save_encoder(encoder: Encoder, path) -> Path:
    """Write the encoder files for stem ``path``; returns the JSON sidecar path."""
    paths = _stem_paths(path)
    paths["meta"].parent.mkdir(parents=True, exist_ok=True)
    meta = encoder.to_dict()
    meta["version"] = ARTIFACT_VERSION
    meta["basis_shape"] = [encoder.G_E.shape[1], encoder.G_E.shape[0]]
    _write_matrix(paths["params"], encoder.params, "w")
    _write_matrix(paths["basis"], encoder.G_E.T, "g")
    if encoder.kernel is not None:
        meta["train_shape"] = [encoder.kernel.n_samples, encoder.kernel.train_X.shape[0]]
        _write_matrix(paths["train"], encoder.kernel.train_X.T, "x")
    with open(paths["meta"], "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2)
    logger.info("Saved %r to %s", encoder, paths["meta"])
    return paths["meta"]


def load_encoder(path) -> Encoder:
    """Rebuild an Encoder from its JSON sidecar; kernel encoders refit their Gram matrix."""
    paths = _stem_paths(path)
    try:
        with open(paths["meta"], encoding="utf-8") as f:
            meta = json.load(f)
    except FileNotFoundError:
        raise ArtifactError(f"Encoder file {paths['meta']} does not exist")
    except json.JSONDecodeError as e:
        raise ArtifactError(f"Encoder file {paths['meta']} is not valid JSON: {e}")
    if meta.get("version") != ARTIFACT_VERSION:
        raise ArtifactError(f"Unsupported encoder artifact version {meta.get('version')!r}")

    try:
        mode = SolverMode(meta["mode"])
        params = _read_matrix(paths["params"], tuple(meta["params_shape"]))
        G_E = _read_matrix(paths["basis"], tuple(meta["basis_shape"])).T
        kernel = None
        if mode == SolverMode.KERNEL:
            spec_dict = dict(meta["kernel"])
            if spec_dict.get("family") == "rbf":
                spec_dict["bandwidth"] = spec_dict["resolved_bandwidth"]
            train_X = _read_matrix(paths["train"], tuple(meta["train_shape"])).T
            kernel = fit_kernel_model(KernelSpec.from_dict(spec_dict), train_X)
        return Encoder(
            mode=mode,
            G_E=G_E,
            params=params,
            lam=float(meta["lambda"]),
            objective_value=float(meta["objective_value"]),
            eigenvalues_used=np.asarray(meta["eigenvalues_used"], dtype=np.float64),
            x_mean=np.asarray(meta["x_mean"], dtype=np.float64),
            kernel=kernel,
        )
    except ArtifactError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ArtifactError(f"Encoder file {paths['meta']} is incomplete: {e}")


def write_embeddings(path, Z: np.ndarray, y_labels: Optional[np.ndarray] = None, s_labels: Optional[np.ndarray] = None):
    """Embeddings as rows (z1..zr) with optional y_label / s_label columns."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(Z.T, columns=[f"z{i + 1}" for i in range(Z.shape[0])])
    if y_labels is not None:
        frame["y_label"] = np.asarray(y_labels, dtype=np.int64)
    if s_labels is not None:
        frame["s_label"] = np.asarray(s_labels, dtype=np.int64)
    frame.to_csv(path, index=False, float_format=settings.FLOAT_FORMAT)


def read_embeddings(path) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Inverse of write_embeddings: (Z as r x n, y_labels, s_labels)."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (ValueError, pd.errors.ParserError) as e:
        raise ArtifactError(f"Cannot read embeddings from {path}: {e}")
    z_columns = [c for c in frame.columns if c.startswith("z")]
    Z = frame[z_columns].to_numpy(dtype=np.float64).T
    y = frame["y_label"].to_numpy(dtype=np.int64) if "y_label" in frame else None
    s = frame["s_label"].to_numpy(dtype=np.int64) if "s_label" in frame else None
    return Z, y, s


TRADEOFF_COLUMNS = ["lambda", "r", "J_y", "J_s", "target_accuracy", "adversary_accuracy"]


def write_tradeoff_csv(path, points: Iterable[TradeoffPoint]):
    """Plot-ready trade-off table, one row per lambda."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([p.to_dict() for p in points], columns=TRADEOFF_COLUMNS)
    if frame["target_accuracy"].isna().all():
        frame = frame.drop(columns=["target_accuracy", "adversary_accuracy"])
    frame.to_csv(path, index=False, float_format=settings.FLOAT_FORMAT)


def read_tradeoff_csv(path) -> List[TradeoffPoint]:
    frame = pd.read_csv(path, float_precision="round_trip")
    points = []
    for row in frame.to_dict(orient="records"):
        target = row.get("target_accuracy")
        adversary = row.get("adversary_accuracy")
        points.append(TradeoffPoint(
            lam=float(row["lambda"]), r=int(row["r"]), J_y=float(row["J_y"]), J_s=float(row["J_s"]),
            target_accuracy=None if target is None or pd.isna(target) else float(target),
            adversary_accuracy=None if adversary is None or pd.isna(adversary) else float(adversary),
        ))
    return points


def write_report(path, report: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path
