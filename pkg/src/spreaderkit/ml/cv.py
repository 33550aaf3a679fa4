"""Stratified cross-validation and fold-safe evaluation."""

from __future__ import annotations

import numpy as np

from ..features import normalize_apply, normalize_fit
from .metrics import accuracy, confusion_matrix, per_class_metrics, roc_auc, weighted_f1
from .models import ModelSpec, make_model
from .resample import smote

RESAMPLING_MODES = ("none", "smote")


def stratified_kfold(y, K: int, seed: int):
    """K disjoint, exhaustive (train, test) index splits with per-fold class
    counts within one sample of the global proportions."""
    y = np.asarray(y)
    if K < 2:
        raise ValueError("K must be at least 2")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(y), dtype=np.int64)
    for c in np.unique(y):
        rows = np.nonzero(y == c)[0]
        if len(rows) < K:
            raise ValueError(f"class {c} has {len(rows)} members, fewer than K={K}")
        rows = rng.permutation(rows)
        fold_of[rows] = np.arange(len(rows)) % K
    splits = []
    for k in range(K):
        test = np.nonzero(fold_of == k)[0]
        train = np.nonzero(fold_of != k)[0]
        splits.append((train, test))
    return splits


def evaluate(spec: ModelSpec, X, y, K: int, resampling: str = "none",
             seed: int = 0, class_names=None, normalize: bool = True) -> dict:
    """Cross-validated evaluation.

    Resampling and feature normalization are fitted on each training fold
    only; metrics are computed over the concatenated out-of-fold
    predictions. Includes ROC/AUC for binary problems.
    """
    if resampling not in RESAMPLING_MODES:
        raise ValueError(f"unknown resampling mode {resampling!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = np.unique(y)
    n_classes = len(classes)
    cls_index = {c: i for i, c in enumerate(classes)}
    if class_names is None:
        class_names = [str(c) for c in classes]

    splits = stratified_kfold(y, K, seed)
    oof_pred = np.empty(len(y), dtype=np.int64)
    oof_scores = np.zeros((len(y), n_classes))
    fold_acc = []
    for fold, (train, test) in enumerate(splits):
        Xtr, ytr = X[train], y[train]
        Xte = X[test]
        if normalize:
            scaler = normalize_fit(Xtr)
            Xtr = normalize_apply(scaler, Xtr)
            Xte = normalize_apply(scaler, Xte)
        if resampling == "smote":
            Xtr, ytr = smote(Xtr, ytr, seed=seed * 1000 + fold)
        model = make_model(
            ModelSpec(**{**spec.__dict__, "seed": spec.seed * 1000 + fold}))
        model.fit(Xtr, ytr)
        pred = model.predict(Xte)
        scores = model.predict_scores(Xte)
        oof_pred[test] = pred
        for j, c in enumerate(model.classes_):
            oof_scores[test, cls_index[c]] = scores[:, j]
        fold_acc.append(float(np.mean(pred == y[test])))

    y_idx = np.array([cls_index[v] for v in y])
    pred_idx = np.array([cls_index[v] for v in oof_pred])
    cm = confusion_matrix(y_idx, pred_idx, n_classes)
    report = {
        "model": spec.kind,
        "n_samples": int(len(y)),
        "k_folds": K,
        "resampling": resampling,
        "class_names": list(class_names),
        "confusion_matrix": cm.tolist(),
        "accuracy": accuracy(cm),
        "weighted_f1": weighted_f1(cm),
        "per_class": {
            class_names[i]: m for i, m in enumerate(per_class_metrics(cm))
        },
        "fold_accuracy": fold_acc,
    }
    if n_classes == 2:
        report["roc"] = roc_auc(oof_scores[:, 1], y_idx)
    return report
