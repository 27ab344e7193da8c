"""
Evaluation heads - closed-form regressors, logistic classifiers and the leakage metrics
used to judge a frozen encoder.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from app.config import settings
from app.engine.numerics import as_matrix, center_columns, pseudo_inverse
from app.engine.solver import embed
from app.errors import EmptyInput, InvalidLabel, InvalidParameter, ShapeMismatch
from app.models.dataset import Dataset
from app.models.encoder import Encoder

logger = logging.getLogger(__name__)


def _rows(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    return as_matrix(arr.reshape(1, -1) if arr.ndim == 1 else arr, name)


# ================================================================
# LINEAR REGRESSION
# ================================================================

@dataclass(frozen=True, eq=False)
class LinearRegressor:
    W: np.ndarray  # m x r
    b: np.ndarray  # m

    def predict(self, Z) -> np.ndarray:
        return self.W @ _rows(Z, "Z") + self.b[:, None]

    def mse(self, Z, T) -> float:
        """Mean over samples of the squared prediction error, summed over outputs."""
        T = _rows(T, "T")
        residual = T - self.predict(Z)
        return float(np.sum(residual ** 2)) / T.shape[1]


def fit_regressor(Z, T) -> LinearRegressor:
    """
    Least-squares W, b for T ~ W Z + b.

    W = T~ Z~^+ (minimum norm), b = mean(T) - W mean(Z).
    """
    Z = _rows(Z, "Z")
    T = _rows(T, "T")
    n = T.shape[1]
    if Z.shape[1] != n:
        raise ShapeMismatch(f"Z has {Z.shape[1]} samples but T has {n}")
    if n < 2:
        raise EmptyInput(f"At least 2 samples are required, got {n}")
    T_c, t_mean = center_columns(T)
    Z_c, z_mean = center_columns(Z)
    W = T_c @ pseudo_inverse(Z_c)
    return LinearRegressor(W=W, b=t_mean - W @ z_mean)


# ================================================================
# LOGISTIC CLASSIFICATION
# ================================================================

@dataclass(frozen=True)
class LogisticHyper:
    learning_rate: float = settings.LOGISTIC_LEARNING_RATE
    epochs: int = settings.LOGISTIC_EPOCHS
    l2: float = settings.LOGISTIC_L2

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidParameter(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise InvalidParameter(f"epochs must be at least 1, got {self.epochs}")
        if self.l2 < 0:
            raise InvalidParameter(f"l2 must be non-negative, got {self.l2}")


@dataclass(frozen=True, eq=False)
class LogisticClassifier:
    W: np.ndarray  # classes x r
    b: np.ndarray  # classes
    iterations: int = 0
    final_loss: float = 0.0
    loss_history: List[float] = field(default_factory=list, repr=False)
    degenerate: bool = False  # trained on a single class
    diverged: bool = False  # loss increased at some epoch

    @property
    def classes(self) -> int:
        return self.b.shape[0]

    def predict_proba(self, Z) -> np.ndarray:
        """Class probabilities, one column per sample of the r x m batch Z."""
        return softmax(self.W @ _rows(Z, "Z") + self.b[:, None], axis=0)

    def predict(self, Z) -> np.ndarray:
        """Class index per sample; ties go to the lowest index."""
        return np.argmax(self.predict_proba(Z), axis=0)


def _check_labels(labels, classes: Optional[int], n: int) -> Tuple[np.ndarray, int]:
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ShapeMismatch(f"Expected {n} labels, got shape {labels.shape}")
    if n and not np.issubdtype(labels.dtype, np.integer):
        if not np.all(np.equal(np.mod(labels, 1), 0)):
            raise InvalidLabel("Labels must be integer class indices")
    labels = labels.astype(np.int64)
    if classes is None:
        classes = int(labels.max()) + 1 if n else 0
    if n and (labels.min() < 0 or labels.max() >= classes):
        raise InvalidLabel(f"Labels must lie in [0, {classes}), got range [{labels.min()}, {labels.max()}]")
    return labels, classes


def fit_logistic(
    Z,
    labels,
    hyper: Optional[LogisticHyper] = None,
    classes: Optional[int] = None,
) -> LogisticClassifier:
    """
    Multinomial logistic regression by full-batch gradient descent.

    Zero initialization, so the fit is deterministic. A single observed class
    yields a constant classifier flagged ``degenerate``; a loss increase between
    epochs sets ``diverged`` and logs a warning.
    """
    hyper = hyper or LogisticHyper()
    Z = _rows(Z, "Z")
    n = Z.shape[1]
    if n == 0:
        raise EmptyInput("Cannot fit a classifier on zero samples")
    labels, classes = _check_labels(labels, classes, n)
    r = Z.shape[0]

    observed = np.unique(labels)
    if observed.size == 1:
        logger.warning("Only class %d present in training labels; using a constant classifier", observed[0])
        b = np.zeros(classes)
        b[observed[0]] = 1.0
        return LogisticClassifier(W=np.zeros((classes, r)), b=b, degenerate=True)

    targets = np.zeros((classes, n))
    targets[labels, np.arange(n)] = 1.0
    W = np.zeros((classes, r))
    b = np.zeros(classes)
    history: List[float] = []
    diverged = False

    for _ in range(hyper.epochs):
        logits = W @ Z + b[:, None]
        log_p = log_softmax(logits, axis=0)
        loss = -float(np.mean(log_p[labels, np.arange(n)])) + 0.5 * hyper.l2 * float(np.sum(W ** 2))
        if history and loss > history[-1] + 1e-12:
            diverged = True
        history.append(loss)
        error = np.exp(log_p) - targets
        W = W - hyper.learning_rate * (error @ Z.T / n + hyper.l2 * W)
        b = b - hyper.learning_rate * error.mean(axis=1)

    if diverged:
        logger.warning("Logistic training loss increased at least once; consider a smaller learning rate")
    return LogisticClassifier(
        W=W, b=b, iterations=hyper.epochs, final_loss=history[-1],
        loss_history=history, diverged=diverged,
    )


def accuracy(clf: LogisticClassifier, Z, labels) -> float:
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EmptyInput("Accuracy is undefined on an empty set")
    predicted = clf.predict(Z)
    if predicted.shape != labels.shape:
        raise ShapeMismatch(f"{labels.size} labels for {predicted.size} predictions")
    return float(np.mean(predicted == labels))


def majority_prior(labels) -> float:
    """Share of the most frequent class: the accuracy of always guessing it."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EmptyInput("Majority prior is undefined on an empty set")
    _, counts = np.unique(labels, return_counts=True)
    return float(counts.max()) / labels.size


def delta_star(adversary_accuracy: float, prior: float) -> float:
    """Absolute gap between adversary accuracy and the random-guess rate."""
    for name, value in (("adversary_accuracy", adversary_accuracy), ("prior", prior)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameter(f"{name} must lie in [0, 1], got {value}")
    return abs(adversary_accuracy - prior)


# ================================================================
# FROZEN-ENCODER PROTOCOL
# ================================================================

@dataclass(frozen=True)
class EvaluationReport:
    r: int
    target_accuracy: float
    adversary_accuracy: float
    target_prior: float
    adversary_prior: float
    delta_star: float
    target_diverged: bool = False
    adversary_diverged: bool = False

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "target_accuracy": self.target_accuracy,
            "adversary_accuracy": self.adversary_accuracy,
            "target_prior": self.target_prior,
            "adversary_prior": self.adversary_prior,
            "delta_star": self.delta_star,
            "target_diverged": self.target_diverged,
            "adversary_diverged": self.adversary_diverged,
        }


def standardize(Z_train: np.ndarray, *others: np.ndarray):
    """Scale embeddings to zero mean, unit variance using training statistics only."""
    mean = Z_train.mean(axis=1, keepdims=True)
    std = Z_train.std(axis=1, keepdims=True)
    std = np.where(std > 0, std, 1.0)
    return tuple((Z - mean) / std for Z in (Z_train, *others))


def evaluate_embeddings(
    Z_train, y_train, s_train, Z_test, y_test, s_test,
    hyper: Optional[LogisticHyper] = None,
) -> EvaluationReport:
    """Fit target and adversary heads on training embeddings, score them on test embeddings."""
    Z_train = np.asarray(Z_train, dtype=np.float64)
    Z_test = np.asarray(Z_test, dtype=np.float64)
    if Z_train.shape[0] != Z_test.shape[0]:
        raise ShapeMismatch(f"Train embedding has {Z_train.shape[0]} dimensions, test has {Z_test.shape[0]}")
    Z_train, Z_test = standardize(Z_train, Z_test)
    y_classes = int(max(np.max(y_train), np.max(y_test))) + 1
    s_classes = int(max(np.max(s_train), np.max(s_test))) + 1
    target = fit_logistic(Z_train, y_train, hyper, classes=y_classes)
    adversary = fit_logistic(Z_train, s_train, hyper, classes=s_classes)
    adversary_accuracy = accuracy(adversary, Z_test, s_test)
    adversary_prior = majority_prior(s_test)
    return EvaluationReport(
        r=Z_train.shape[0],
        target_accuracy=accuracy(target, Z_test, y_test),
        adversary_accuracy=adversary_accuracy,
        target_prior=majority_prior(y_test),
        adversary_prior=adversary_prior,
        delta_star=delta_star(adversary_accuracy, adversary_prior),
        target_diverged=target.diverged,
        adversary_diverged=adversary.diverged,
    )


def _labels(dataset: Dataset, which: str) -> np.ndarray:
    labels = dataset.y_labels if which == "target" else dataset.s_labels
    if labels is None:
        raise InvalidLabel(f"Dataset has no {which} class labels to evaluate against")
    return labels


def evaluate_encoder(
    encoder: Encoder,
    train: Dataset,
    test: Dataset,
    hyper: Optional[LogisticHyper] = None,
) -> EvaluationReport:
    """Freeze the encoder, train both heads on its training embeddings and report test accuracies."""
    report = evaluate_embeddings(
        embed(encoder, train.X), _labels(train, "target"), _labels(train, "sensitive"),
        embed(encoder, test.X), _labels(test, "target"), _labels(test, "sensitive"),
        hyper=hyper,
    )
    logger.info(
        "Evaluation r=%d: target %.4f (prior %.4f), adversary %.4f (prior %.4f), delta* %.4f",
        report.r, report.target_accuracy, report.target_prior,
        report.adversary_accuracy, report.adversary_prior, report.delta_star,
    )
    return report
