"""Classification metrics: accuracy, macro precision/recall/F1, confusion."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError


def classification_metrics(y_true, y_pred, labels=None) -> dict:
    """Tally-based metrics over a fixed label ordering.

    Macro precision/recall/F1 average per-class values; classes with a zero
    denominator contribute 0 (flagged via ``zero_division_classes``). The
    confusion matrix is returned both as raw counts and row-normalized
    (rows with no true samples stay all-zero).
    """
    y_true = np.asarray(y_true, dtype=object)
    y_pred = np.asarray(y_pred, dtype=object)
    if y_true.shape != y_pred.shape:
        raise InvalidParameterError("y_true and y_pred must have equal length")
    if labels is None:
        labels = sorted(set(y_true.tolist()) | set(y_pred.tolist()))
    labels = list(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    k = len(labels)
    counts = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[index[t], index[p]] += 1
    n = y_true.size
    accuracy = float(np.trace(counts) / n) if n else 0.0

    tp = np.diag(counts).astype(np.float64)
    pred_totals = counts.sum(axis=0).astype(np.float64)
    true_totals = counts.sum(axis=1).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(pred_totals > 0, tp / pred_totals, 0.0)
        recall = np.where(true_totals > 0, tp / true_totals, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)

    zero_div = [labels[i] for i in range(k) if pred_totals[i] == 0 or true_totals[i] == 0]

    normalized = np.zeros((k, k), dtype=np.float64)
    nonzero = true_totals > 0
    normalized[nonzero] = counts[nonzero] / true_totals[nonzero, None]

    return {
        "accuracy": accuracy,
        "precision": float(precision.mean()),
        "recall": float(recall.mean()),
        "f1": float(f1.mean()),
        "labels": labels,
        "confusion_counts": counts,
        "confusion": normalized,
        "per_class_precision": precision,
        "per_class_recall": recall,
        "per_class_f1": f1,
        "zero_division_classes": zero_div,
    }
