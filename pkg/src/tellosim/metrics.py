"""Classification metrics and the flight-outcome regression.

Macro F1 averages per-label F1 scores with the arithmetic mean; a label
with zero precision and recall contributes an F1 of 0, and labels absent
from both the truth and the predictions are left out of the average (for
the full five-command problem all labels are present and the mean runs
over all five).

`ols_fit` is ordinary least squares via the normal equations, used to
regress the landed-on-platform flag on scene statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

LABELS = 5


@dataclass
class MetricsReport:
    confusion: np.ndarray  # [true, predicted] counts
    precision: List[float]
    recall: List[float]
    f1: List[float]
    macro_f1: float
    accuracy: float

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion.tolist(),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
        }


def confusion_matrix(predictions: Sequence[int], labels: Sequence[int],
                     n_labels: int = LABELS) -> np.ndarray:
    if len(predictions) != len(labels) or len(labels) == 0:
        raise ValueError("need equal-length nonempty prediction/label sequences")
    cm = np.zeros((n_labels, n_labels), dtype=np.int64)
    for pred, true in zip(predictions, labels):
        if not (0 <= pred < n_labels and 0 <= true < n_labels):
            raise ValueError("label value out of range")
        cm[true, pred] += 1
    return cm


def metrics_from_confusion(cm: np.ndarray) -> MetricsReport:
    n = cm.shape[0]
    tp = np.diag(cm).astype(float)
    pred_totals = cm.sum(axis=0).astype(float)
    true_totals = cm.sum(axis=1).astype(float)
    precision = [tp[i] / pred_totals[i] if pred_totals[i] > 0 else 0.0 for i in range(n)]
    recall = [tp[i] / true_totals[i] if true_totals[i] > 0 else 0.0 for i in range(n)]
    f1 = []
    for p, r in zip(precision, recall):
        f1.append(2.0 * p * r / (p + r) if p + r > 0 else 0.0)
    present = [i for i in range(n) if pred_totals[i] + true_totals[i] > 0]
    macro = sum(f1[i] for i in present) / len(present) if present else 0.0
    total = cm.sum()
    accuracy = float(tp.sum() / total) if total > 0 else 0.0
    return MetricsReport(cm, precision, recall, f1, macro, accuracy)


def confusion_and_macro_f1(predictions: Sequence[int], labels: Sequence[int],
                           n_labels: int = LABELS) -> MetricsReport:
    return metrics_from_confusion(confusion_matrix(predictions, labels, n_labels))


def label_weights(histogram: Sequence[int]) -> List[float]:
    """Loss weights: majority-class share divided by each label's share.
    The majority label gets weight 1."""
    if any(c <= 0 for c in histogram):
        raise ValueError("all labels must be present")
    majority = max(histogram)
    return [majority / c for c in histogram]


@dataclass
class RegressionResult:
    betas: List[float]  # intercept first
    r_squared: float
    residuals: np.ndarray

    def to_dict(self) -> dict:
        return {"betas": self.betas, "r_squared": self.r_squared}


class RankDeficientError(ValueError):
    """The regression design matrix does not have full column rank."""


def ols_fit(rows: Sequence[Sequence[float]], y: Sequence[float]) -> RegressionResult:
    """Least squares with intercept via the normal equations.

    R-squared is 1 - SSR/SST, defined as 0 when the response has zero
    variance. Raises RankDeficientError unless the design (with the
    intercept column) has full column rank and at least two more rows
    than parameters.
    """
    x = np.asarray(rows, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    yv = np.asarray(y, dtype=float)
    n, p = x.shape
    design = np.hstack([np.ones((n, 1)), x])
    if n < p + 3:
        raise RankDeficientError("need at least two more rows than parameters")
    if np.linalg.matrix_rank(design) < p + 1:
        raise RankDeficientError("design matrix is rank deficient")
    gram = design.T @ design
    betas = np.linalg.solve(gram, design.T @ yv)
    fitted = design @ betas
    residuals = yv - fitted
    ssr = float(residuals @ residuals)
    sst = float(((yv - yv.mean()) ** 2).sum())
    r_squared = 0.0 if sst == 0.0 else 1.0 - ssr / sst
    return RegressionResult(list(betas), r_squared, residuals)
