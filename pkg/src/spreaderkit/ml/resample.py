"""Class-imbalance resampling: SMOTE oversampling and random undersampling."""

from __future__ import annotations

import numpy as np


def smote(X: np.ndarray, y: np.ndarray, seed: int, k_neighbors: int = 5):
    """Oversample every minority class up to the majority count.

    Synthetic points are x + u * (x_nn - x) with u ~ U(0,1) and x_nn drawn
    among the k nearest same-class neighbors (Euclidean). Original rows are
    preserved and come first in the output.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(y, return_counts=True)
    target = counts.max()
    new_X = [X]
    new_y = [y]
    for cls, count in zip(classes, counts):
        deficit = int(target - count)
        if deficit == 0:
            continue
        if count < 2:
            raise ValueError(
                f"smote: class {cls} has {count} sample(s); need at least 2")
        rows = X[y == cls]
        k = min(k_neighbors, count - 1)
        # pairwise distances within the class; self excluded via argsort[1:]
        d2 = ((rows[:, None, :] - rows[None, :, :]) ** 2).sum(axis=2)
        nn = np.argsort(d2, axis=1, kind="stable")[:, 1:k + 1]
        base_idx = rng.integers(0, count, size=deficit)
        nn_pick = rng.integers(0, k, size=deficit)
        u = rng.random(deficit)
        base = rows[base_idx]
        neighbor = rows[nn[base_idx, nn_pick]]
        synth = base + u[:, None] * (neighbor - base)
        new_X.append(synth)
        new_y.append(np.full(deficit, cls, dtype=np.int64))
    return np.vstack(new_X), np.concatenate(new_y)


def undersample(X: np.ndarray, y: np.ndarray, class_id: int, target_n: int,
                seed: int):
    """Keep a uniform random subset of size target_n of the named class;
    all other rows are kept. Row order of survivors is preserved."""
    y = np.asarray(y, dtype=np.int64)
    cls_rows = np.nonzero(y == class_id)[0]
    if target_n > len(cls_rows):
        raise ValueError(
            f"undersample: class {class_id} has {len(cls_rows)} rows, "
            f"cannot keep {target_n}")
    rng = np.random.default_rng(seed)
    keep_cls = rng.choice(cls_rows, size=target_n, replace=False)
    mask = np.ones(len(y), dtype=bool)
    mask[cls_rows] = False
    mask[keep_cls] = True
    idx = np.nonzero(mask)[0]
    return np.asarray(X)[idx], y[idx], idx
