"""Classifiers implemented from first principles on numpy.

All models share the same surface: ``fit(X, y)``, ``predict(X)`` and
``predict_scores(X)`` (one score column per class, aligned with
``classes_``). Every fit/predict path is deterministic under a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

MODEL_KINDS = (
    "logistic_regression_ovr",
    "knn",
    "gaussian_nb",
    "decision_tree",
    "bagged_trees",
    "majority_baseline",
    "random_baseline",
)


@dataclass
class ModelSpec:
    kind: str = "logistic_regression_ovr"
    k: int = 5                    # knn
    n_estimators: int = 100       # bagging
    max_depth: Optional[int] = None
    lr: float = 0.1               # logistic
    epochs: int = 500
    l2: float = 1e-4
    class_weight: str = "none"    # "none" or "balanced"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.class_weight not in ("none", "balanced"):
            raise ValueError(f"class_weight must be none/balanced, got {self.class_weight!r}")


def _check_train(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("training set has a single class")
    return X, y, classes


def class_weights(y: np.ndarray, classes: np.ndarray, mode: str) -> np.ndarray:
    """Per-sample weights; 'balanced' weighs each class inversely
    proportional to its frequency (n / (k * count))."""
    if mode == "none":
        return np.ones(len(y))
    counts = {c: np.sum(y == c) for c in classes}
    n, k = len(y), len(classes)
    return np.array([n / (k * counts[c]) for c in y])


def logistic_gradient(X, targets, w, b, sample_weight, l2):
    """Gradient of weighted binary cross-entropy + L2 at (w, b)."""
    z = X @ w + b
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
    coef = (p - targets) * sample_weight
    denom = sample_weight.sum()
    grad_w = X.T @ coef / denom + l2 * w
    grad_b = coef.sum() / denom
    return grad_w, grad_b


class LogisticRegressionOVR:
    """One-vs-rest logistic regression trained by batch gradient descent."""

    def __init__(self, lr=0.1, epochs=500, l2=1e-4, class_weight="none", seed=0):
        self.lr, self.epochs, self.l2 = lr, epochs, l2
        self.class_weight = class_weight
        self.seed = seed

    def fit(self, X, y):
        X, y, self.classes_ = _check_train(X, y)
        sw = class_weights(y, self.classes_, self.class_weight)
        self.w_ = np.zeros((len(self.classes_), X.shape[1]))
        self.b_ = np.zeros(len(self.classes_))
        for ci, c in enumerate(self.classes_):
            targets = (y == c).astype(np.float64)
            w = np.zeros(X.shape[1])
            b = 0.0
            for _ in range(self.epochs):
                gw, gb = logistic_gradient(X, targets, w, b, sw, self.l2)
                w -= self.lr * gw
                b -= self.lr * gb
            self.w_[ci], self.b_[ci] = w, b
        return self

    def predict_scores(self, X):
        z = np.asarray(X) @ self.w_.T + self.b_
        return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_scores(X), axis=1)]


class KNeighbors:
    """k-NN with Euclidean distance; vote ties go to the smaller class id."""

    def __init__(self, k=5, seed=0):
        self.k = k

    def fit(self, X, y):
        X, y, self.classes_ = _check_train(X, y)
        if self.k > len(y):
            raise ValueError(f"knn: k={self.k} exceeds training size {len(y)}")
        self.X_, self.y_ = X, y
        return self

    def predict_scores(self, X):
        X = np.asarray(X, dtype=np.float64)
        d2 = ((X[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
        # stable argsort so equal distances resolve by training order
        nn = np.argsort(d2, axis=1, kind="stable")[:, :self.k]
        scores = np.zeros((len(X), len(self.classes_)))
        cls_index = {c: i for i, c in enumerate(self.classes_)}
        for i in range(len(X)):
            for j in nn[i]:
                scores[i, cls_index[self.y_[j]]] += 1.0
        return scores / self.k

    def predict(self, X):
        scores = self.predict_scores(X)
        # argmax picks the first (smallest class id) maximum
        return self.classes_[np.argmax(scores, axis=1)]


class GaussianNB:
    """Gaussian naive Bayes with a variance floor."""

    VAR_FLOOR = 1e-9

    def __init__(self, seed=0):
        pass

    def fit(self, X, y):
        X, y, self.classes_ = _check_train(X, y)
        k, f = len(self.classes_), X.shape[1]
        self.mean_ = np.zeros((k, f))
        self.var_ = np.zeros((k, f))
        self.log_prior_ = np.zeros(k)
        for ci, c in enumerate(self.classes_):
            rows = X[y == c]
            self.mean_[ci] = rows.mean(axis=0)
            self.var_[ci] = np.maximum(rows.var(axis=0), self.VAR_FLOOR)
            self.log_prior_[ci] = np.log(len(rows) / len(y))
        return self

    def _log_posterior(self, X):
        X = np.asarray(X, dtype=np.float64)
        out = np.zeros((len(X), len(self.classes_)))
        for ci in range(len(self.classes_)):
            diff = X - self.mean_[ci]
            out[:, ci] = (self.log_prior_[ci]
                          - 0.5 * np.sum(np.log(2 * np.pi * self.var_[ci]))
                          - 0.5 * np.sum(diff ** 2 / self.var_[ci], axis=1))
        return out

    def predict_scores(self, X):
        lp = self._log_posterior(X)
        lp -= lp.max(axis=1, keepdims=True)
        p = np.exp(lp)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self.classes_[np.argmax(self._log_posterior(X), axis=1)]


class DecisionTree:
    """CART classification tree (gini impurity, sample-weight aware)."""

    def __init__(self, max_depth=None, class_weight="none", seed=0,
                 min_samples_split=2):
        self.max_depth = max_depth
        self.class_weight = class_weight
        self.min_samples_split = min_samples_split

    def fit(self, X, y, sample_weight=None):
        X, y, self.classes_ = _check_train(X, y)
        if sample_weight is None:
            sample_weight = class_weights(y, self.classes_, self.class_weight)
        else:
            sample_weight = np.asarray(sample_weight, dtype=np.float64)
            if self.class_weight == "balanced":
                sample_weight = sample_weight * class_weights(
                    y, self.classes_, "balanced")
        cls_index = {c: i for i, c in enumerate(self.classes_)}
        y_idx = np.array([cls_index[v] for v in y])
        self.tree_ = self._grow(X, y_idx, sample_weight, depth=0)
        return self

    def _grow(self, X, y, sw, depth):
        k = len(self.classes_)
        weight_per_class = np.bincount(y, weights=sw, minlength=k)
        total = weight_per_class.sum()
        node = {"counts": weight_per_class, "total": total}
        if (len(y) < self.min_samples_split
                or (self.max_depth is not None and depth >= self.max_depth)
                or np.count_nonzero(weight_per_class) <= 1):
            return node
        split = self._best_split(X, y, sw, weight_per_class, total)
        if split is None:
            return node
        feat, thresh = split
        left = X[:, feat] <= thresh
        node["feature"] = feat
        node["threshold"] = thresh
        node["left"] = self._grow(X[left], y[left], sw[left], depth + 1)
        node["right"] = self._grow(X[~left], y[~left], sw[~left], depth + 1)
        return node

    def _best_split(self, X, y, sw, counts, total):
        k = len(self.classes_)
        parent_gini = 1.0 - np.sum((counts / total) ** 2)
        best = None
        best_score = parent_gini - 1e-12
        for feat in range(X.shape[1]):
            col = X[:, feat]
            order = np.argsort(col, kind="stable")
            vals = col[order]
            if vals[0] == vals[-1]:
                continue
            onehot = np.zeros((len(y), k))
            onehot[np.arange(len(y)), y[order]] = sw[order]
            left_counts = np.cumsum(onehot, axis=0)
            left_tot = np.cumsum(sw[order])
            # candidate split after position i (0-based), only where the
            # feature value actually changes
            valid = np.nonzero(vals[:-1] < vals[1:])[0]
            if len(valid) == 0:
                continue
            lc = left_counts[valid]
            lt = left_tot[valid]
            rc = counts - lc
            rt = total - lt
            gini_l = 1.0 - np.sum((lc / lt[:, None]) ** 2, axis=1)
            gini_r = 1.0 - np.sum((rc / rt[:, None]) ** 2, axis=1)
            score = (lt * gini_l + rt * gini_r) / total
            i = int(np.argmin(score))
            if score[i] < best_score:
                best_score = score[i]
                pos = valid[i]
                best = (feat, (vals[pos] + vals[pos + 1]) / 2.0)
        return best

    def _leaf_scores(self, x, node):
        while "feature" in node:
            node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
        return node["counts"] / node["total"]

    def predict_scores(self, X):
        X = np.asarray(X, dtype=np.float64)
        return np.array([self._leaf_scores(x, self.tree_) for x in X])

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_scores(X), axis=1)]


class BaggedTrees:
    """Bootstrap-aggregated decision trees with majority vote."""

    def __init__(self, n_estimators=100, max_depth=None, class_weight="none",
                 seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.class_weight = class_weight
        self.seed = seed

    def fit(self, X, y):
        X, y, self.classes_ = _check_train(X, y)
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_estimators)
        self.estimators_ = []
        for ss in seeds:
            rng = np.random.default_rng(ss)
            idx = rng.integers(0, len(y), size=len(y))
            # resample until the bootstrap keeps at least two classes
            while len(np.unique(y[idx])) < 2:
                idx = rng.integers(0, len(y), size=len(y))
            tree = DecisionTree(max_depth=self.max_depth,
                                class_weight=self.class_weight)
            tree.fit(X[idx], y[idx])
            self.estimators_.append(tree)
        return self

    def predict_scores(self, X):
        X = np.asarray(X, dtype=np.float64)
        votes = np.zeros((len(X), len(self.classes_)))
        cls_index = {c: i for i, c in enumerate(self.classes_)}
        for tree in self.estimators_:
            pred = tree.predict(X)
            for i, p in enumerate(pred):
                votes[i, cls_index[p]] += 1.0
        return votes / self.n_estimators

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_scores(X), axis=1)]


class MajorityBaseline:
    """Always predicts the most frequent training class."""

    def __init__(self, seed=0):
        pass

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.int64)
        if len(y) == 0:
            raise ValueError("empty training set")
        self.classes_ = np.unique(y)
        counts = np.array([np.sum(y == c) for c in self.classes_])
        self.majority_ = self.classes_[int(np.argmax(counts))]
        return self

    def predict(self, X):
        return np.full(len(X), self.majority_, dtype=np.int64)

    def predict_scores(self, X):
        scores = np.zeros((len(X), len(self.classes_)))
        scores[:, list(self.classes_).index(self.majority_)] = 1.0
        return scores


class RandomBaseline:
    """Predicts a uniformly random class; deterministic per (seed, input)."""

    def __init__(self, seed=0):
        self.seed = seed

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.int64)
        if len(y) == 0:
            raise ValueError("empty training set")
        self.classes_ = np.unique(y)
        return self

    def _rng(self, X):
        return np.random.default_rng((self.seed, len(X)))

    def predict(self, X):
        return self._rng(X).choice(self.classes_, size=len(X))

    def predict_scores(self, X):
        raw = self._rng(X).random((len(X), len(self.classes_)))
        return raw / raw.sum(axis=1, keepdims=True)


def make_model(spec: ModelSpec):
    kind = spec.kind
    if kind == "logistic_regression_ovr":
        return LogisticRegressionOVR(lr=spec.lr, epochs=spec.epochs, l2=spec.l2,
                                     class_weight=spec.class_weight, seed=spec.seed)
    if kind == "knn":
        return KNeighbors(k=spec.k, seed=spec.seed)
    if kind == "gaussian_nb":
        return GaussianNB(seed=spec.seed)
    if kind == "decision_tree":
        return DecisionTree(max_depth=spec.max_depth,
                            class_weight=spec.class_weight, seed=spec.seed)
    if kind == "bagged_trees":
        return BaggedTrees(n_estimators=spec.n_estimators, max_depth=spec.max_depth,
                           class_weight=spec.class_weight, seed=spec.seed)
    if kind == "majority_baseline":
        return MajorityBaseline(seed=spec.seed)
    if kind == "random_baseline":
        return RandomBaseline(seed=spec.seed)
    raise ValueError(f"unknown model kind {kind!r}")
