"""SMOTE and undersampling contracts."""

import numpy as np
import pytest

from spreaderkit.ml.resample import smote, undersample


def imbalanced(seed=0, n_maj=100, n_min=20):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0, 1, size=(n_maj, 3)),
                   rng.normal(3, 1, size=(n_min, 3))])
    y = np.r_[np.zeros(n_maj, dtype=int), np.ones(n_min, dtype=int)]
    return X, y


class TestSmote:
    def test_exact_balancing(self):
        X, y = imbalanced()
        Xs, ys = smote(X, y, seed=1)
        _, counts = np.unique(ys, return_counts=True)
        assert list(counts) == [100, 100]
        # originals preserved, in order
        assert np.array_equal(Xs[:120], X)

    def test_synthetic_points_collinear_with_same_class_pairs(self):
        X, y = imbalanced()
        Xs, ys = smote(X, y, seed=2)
        minority = X[y == 1]
        for row in Xs[120:]:
            found = False
            for i in range(len(minority)):
                for j in range(len(minority)):
                    if i == j:
                        continue
                    a, b = minority[i], minority[j]
                    span = b - a
                    denom = span @ span
                    if denom == 0:
                        continue
                    t = (row - a) @ span / denom
                    if -1e-9 <= t <= 1 + 1e-9 and np.linalg.norm(
                            a + t * span - row) < 1e-9:
                        found = True
                        break
                if found:
                    break
            assert found, "synthetic point not on a same-class segment"

    def test_no_bit_exact_duplicates_of_originals(self):
        X, y = imbalanced(seed=5)
        Xs, _ = smote(X, y, seed=3)
        synth = Xs[len(X):]
        originals = {tuple(r) for r in X}
        dup = sum(1 for r in synth if tuple(r) in originals)
        assert dup == 0

    def test_already_balanced_unchanged(self):
        X, y = imbalanced(n_maj=30, n_min=30)
        Xs, ys = smote(X, y, seed=4)
        assert np.array_equal(Xs, X) and np.array_equal(ys, y)

    def test_singleton_class_errors_naming_it(self):
        X = np.zeros((5, 2))
        y = np.array([0, 0, 0, 0, 7])
        with pytest.raises(ValueError, match="7"):
            smote(X, y, seed=0)

    def test_seeded_determinism(self):
        X, y = imbalanced(seed=6)
        a = smote(X, y, seed=9)[0]
        b = smote(X, y, seed=9)[0]
        assert np.array_equal(a, b)


class TestUndersample:
    def test_target_counts(self):
        X, y = imbalanced()
        Xu, yu, idx = undersample(X, y, class_id=0, target_n=20, seed=0)
        assert np.sum(yu == 0) == 20 and np.sum(yu == 1) == 20
        assert np.array_equal(Xu, X[idx])

    def test_identity_at_full_count(self):
        X, y = imbalanced()
        Xu, yu, _ = undersample(X, y, class_id=0, target_n=100, seed=0)
        assert np.array_equal(Xu, X) and np.array_equal(yu, y)

    def test_too_large_target_errors(self):
        X, y = imbalanced()
        with pytest.raises(ValueError):
            undersample(X, y, class_id=1, target_n=21, seed=0)

    def test_seeded_determinism(self):
        X, y = imbalanced()
        a = undersample(X, y, 0, 30, seed=4)[2]
        b = undersample(X, y, 0, 30, seed=4)[2]
        assert np.array_equal(a, b)
