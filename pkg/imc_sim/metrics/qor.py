"""
Quality-of-result metrics: approximate output against golden output.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from imc_sim.errors import AllExcluded, EmptyInput, LengthMismatch

ARE_EPSILON = 1e-6


class Metric(str, Enum):
    RMSE = "RMSE"
    ARE = "ARE"
    PRECISION_RECALL = "PrecisionRecall"
    AGREEMENT = "Agreement"


@dataclass(frozen=True)
class QorValue:
    metric: Metric
    value: float
    value2: float | None = None   # recall, for precision/recall
    excluded: int = 0             # ARE elements below epsilon

    def __post_init__(self):
        if self.metric in (Metric.RMSE, Metric.ARE) and not self.value >= 0:
            raise ValueError(f"{self.metric.value} must be >= 0, got {self.value}")
        if self.metric in (Metric.AGREEMENT, Metric.PRECISION_RECALL):
            for v in (self.value, self.value2):
                if v is not None and not 0.0 <= v <= 1.0:
                    raise ValueError(f"{self.metric.value} value {v} outside [0, 1]")


def _paired(approx, golden) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(approx, dtype=np.float64).reshape(-1)
    g = np.asarray(golden, dtype=np.float64).reshape(-1)
    if a.size != g.size:
        raise LengthMismatch(f"approx has {a.size} elements, golden has {g.size}")
    if a.size == 0:
        raise EmptyInput("cannot compare empty sequences")
    return a, g


def rmse(approx, golden) -> float:
    a, g = _paired(approx, golden)
    return float(np.sqrt(np.mean((a - g) ** 2)))


def are(approx, golden, eps: float = ARE_EPSILON) -> tuple[float, int]:
    """
    Average relative error as a fraction, over golden elements with |g| >= eps.

    Returns:
        (average relative error, number of excluded elements)
    """
    a, g = _paired(approx, golden)
    keep = np.abs(g) >= eps
    if not keep.any():
        raise AllExcluded(f"every golden element is below eps={eps}")
    relative = np.abs(a[keep] - g[keep]) / np.abs(g[keep])
    return float(np.mean(relative)), int(a.size - np.count_nonzero(keep))


def _pixel_set(edges) -> set[tuple[int, ...]]:
    if isinstance(edges, np.ndarray):
        return {tuple(int(i) for i in idx) for idx in np.argwhere(edges)}
    return {tuple(p) if isinstance(p, tuple | list) else p for p in edges}


def precision_recall(pred_edges, gold_edges) -> tuple[float, float]:
    """
    Precision and recall of predicted edge pixels.

    Accepts pixel sets or edge masks; an empty denominator yields 1.0.
    """
    if isinstance(pred_edges, np.ndarray) and isinstance(gold_edges, np.ndarray):
        pred = pred_edges.astype(bool)
        gold = gold_edges.astype(bool)
        if pred.shape != gold.shape:
            raise LengthMismatch(f"edge maps differ in shape: {pred.shape} vs {gold.shape}")
        hits = int(np.count_nonzero(pred & gold))
        n_pred, n_gold = int(np.count_nonzero(pred)), int(np.count_nonzero(gold))
    else:
        pred, gold = _pixel_set(pred_edges), _pixel_set(gold_edges)
        hits, n_pred, n_gold = len(pred & gold), len(pred), len(gold)

    precision = hits / n_pred if n_pred else 1.0
    recall = hits / n_gold if n_gold else 1.0
    return precision, recall


def agreement(pred_labels, golden_labels) -> float:
    p = np.asarray(pred_labels).reshape(-1)
    g = np.asarray(golden_labels).reshape(-1)
    if p.size != g.size:
        raise LengthMismatch(f"{p.size} predictions vs {g.size} golden labels")
    if p.size == 0:
        raise EmptyInput("no labels to compare")
    return float(np.mean(p == g))


def evaluate(metric: Metric, approx, golden, eps: float = ARE_EPSILON) -> QorValue:
    """Compute `metric` and wrap it as a QorValue."""
    metric = Metric(metric)
    if metric is Metric.RMSE:
        return QorValue(metric, rmse(approx, golden))
    if metric is Metric.ARE:
        value, excluded = are(approx, golden, eps)
        return QorValue(metric, value, excluded=excluded)
    if metric is Metric.PRECISION_RECALL:
        precision, recall = precision_recall(approx, golden)
        return QorValue(metric, precision, recall)
    return QorValue(metric, agreement(approx, golden))


def perfect(metric: Metric) -> QorValue:
    metric = Metric(metric)
    if metric in (Metric.RMSE, Metric.ARE):
        return QorValue(metric, 0.0)
    if metric is Metric.PRECISION_RECALL:
        return QorValue(metric, 1.0, 1.0)
    return QorValue(metric, 1.0)


def degradation(qor: QorValue) -> float:
    """Higher-is-worse scalar for any metric; 0 means identical to golden."""
    if qor.metric in (Metric.RMSE, Metric.ARE):
        return qor.value
    if qor.metric is Metric.PRECISION_RECALL:
        return 1.0 - min(qor.value, qor.value2 if qor.value2 is not None else qor.value)
    return 1.0 - qor.value


def beyond_threshold(qor: QorValue, threshold: float) -> bool:
    """True when a run's output counts as unusable."""
    if qor.metric in (Metric.RMSE, Metric.ARE):
        return qor.value > threshold
    if qor.metric is Metric.PRECISION_RECALL:
        return min(qor.value, qor.value2 if qor.value2 is not None else qor.value) < threshold
    return qor.value < threshold
