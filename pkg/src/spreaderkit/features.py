"""Feature normalization and fusion of embeddings with profile features."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ingest import PROFILE_FEATURES, UserProfile


@dataclass
class Scaler:
    """Per-column z-score parameters fitted on training rows only.

    Zero-variance columns get std=0 and are mapped to all-zeros instead of
    dividing by zero.
    """

    mean: np.ndarray
    std: np.ndarray

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"mean": self.mean.tolist(), "std": self.std.tolist()}, fh)

    @classmethod
    def load(cls, path) -> "Scaler":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(mean=np.asarray(obj["mean"]), std=np.asarray(obj["std"]))


def normalize_fit(matrix: np.ndarray, fold_rows=None) -> Scaler:
    """Fit per-column mean/std on the given training rows (all rows if None)."""
    rows = matrix if fold_rows is None else matrix[fold_rows]
    if rows.shape[0] == 0:
        raise ValueError("normalize_fit: no training rows")
    mean = rows.mean(axis=0)
    std = rows.std(axis=0)
    std = np.where(std < 1e-12, 0.0, std)
    return Scaler(mean=mean, std=std)


def normalize_apply(scaler: Scaler, matrix: np.ndarray) -> np.ndarray:
    safe = np.where(scaler.std == 0.0, 1.0, scaler.std)
    out = (matrix - scaler.mean) / safe
    out[:, scaler.std == 0.0] = 0.0
    return out


def profile_row(profile: UserProfile) -> np.ndarray:
    return np.array([getattr(profile, name) for name in PROFILE_FEATURES],
                    dtype=np.float64)


def fuse(embeddings: np.ndarray, emb_row_of: dict[str, int],
         profiles: dict[str, UserProfile], user_ids: list[str]) -> np.ndarray:
    """Concatenate embedding rows with the 7 profile features, in that
    column order. Missing profiles are imputed as zeros; a user missing
    from the embedding matrix is an error.
    """
    missing = [u for u in user_ids if u not in emb_row_of]
    if missing:
        raise KeyError(
            f"fuse: {len(missing)} users missing from embedding matrix "
            f"(first: {missing[0]!r})")
    n_profile = len(PROFILE_FEATURES)
    out = np.zeros((len(user_ids), embeddings.shape[1] + n_profile))
    imputed = 0
    for i, user in enumerate(user_ids):
        out[i, :embeddings.shape[1]] = embeddings[emb_row_of[user]]
        prof = profiles.get(user)
        if prof is None:
            imputed += 1
        else:
            out[i, embeddings.shape[1]:] = profile_row(prof)
    if imputed:
        import logging
        logging.getLogger(__name__).warning(
            "fuse: %d users had no profile; features imputed as zeros", imputed)
    return out


def write_features_csv(matrix: np.ndarray, user_ids: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("user_id," + ",".join(f"f{j}" for j in range(matrix.shape[1])) + "\n")
        for i, user in enumerate(user_ids):
            fh.write(user + "," + ",".join(f"{x:.12g}" for x in matrix[i]) + "\n")
