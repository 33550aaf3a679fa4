"""Classification metrics computed from first principles."""

from __future__ import annotations

import numpy as np


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(np.asarray(y_true), np.asarray(y_pred)):
        cm[int(t), int(p)] += 1
    return cm


def per_class_metrics(cm: np.ndarray) -> list[dict]:
    """Precision/recall/F1 per class. Precision (and F1) are None when the
    class was never predicted; recall is None when the class has no support.
    """
    out = []
    for c in range(cm.shape[0]):
        tp = cm[c, c]
        predicted = cm[:, c].sum()
        support = cm[c, :].sum()
        precision = float(tp / predicted) if predicted > 0 else None
        recall = float(tp / support) if support > 0 else None
        if precision is None or recall is None or precision + recall == 0:
            f1 = None
        else:
            f1 = 2 * precision * recall / (precision + recall)
        out.append({
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": int(support),
        })
    return out


def accuracy(cm: np.ndarray) -> float:
    return float(np.trace(cm) / cm.sum())


def weighted_f1(cm: np.ndarray) -> float:
    """Support-weighted mean of per-class F1; undefined F1 counts as 0."""
    per = per_class_metrics(cm)
    total = sum(p["support"] for p in per)
    acc = 0.0
    for p in per:
        f1 = p["f1"] if p["f1"] is not None else 0.0
        acc += f1 * p["support"]
    return acc / total


def roc_curve(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ROC by sweeping thresholds over the unique scores, descending.

    Returns (fpr, tpr, thresholds) starting at (0, 0) with threshold +inf.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if set(np.unique(labels)) - {0, 1}:
        raise ValueError("roc_curve: labels must be binary 0/1")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_curve: need both classes present")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    tps = np.cumsum(sorted_labels == 1)
    fps = np.cumsum(sorted_labels == 0)
    # keep only the last index of each run of equal scores
    distinct = np.r_[np.nonzero(np.diff(sorted_scores))[0], len(sorted_scores) - 1]
    tpr = np.r_[0.0, tps[distinct] / n_pos]
    fpr = np.r_[0.0, fps[distinct] / n_neg]
    thresholds = np.r_[np.inf, sorted_scores[distinct]]
    return fpr, tpr, thresholds


def auc_trapezoid(fpr: np.ndarray, tpr: np.ndarray) -> float:
    return float(np.trapezoid(tpr, fpr))


def roc_auc(scores, labels):
    """Full ROC sweep plus trapezoidal AUC."""
    fpr, tpr, thresholds = roc_curve(scores, labels)
    return {
        "fpr": fpr.tolist(),
        "tpr": tpr.tolist(),
        "thresholds": [float(t) for t in thresholds],
        "auc": auc_trapezoid(fpr, tpr),
    }
