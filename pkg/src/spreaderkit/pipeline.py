"""Two-stage classification pipeline: disengaged-vs-others on embedding
features, then a four-way classifier over the non-disengaged users on fused
embedding + profile features. Each stage reads/writes stable artifact names
under the workdir."""

from __future__ import annotations

import json
import os
import pickle

import numpy as np

from . import embed as embed_mod
from . import features as feat_mod
from . import ingest, labeler
from .graph import FollowGraph, build_graph
from .ml import ModelSpec, evaluate, undersample
from .ml.models import make_model

ARTIFACTS = {
    "graph": "graph.bin",
    "labels": "labels.csv",
    "embeddings": "embeddings.csv",
    "features": "features.csv",
    "scaler": "scaler.json",
    "meta": "meta.json",
    "stage1_report": "stage1_report.json",
    "stage2_report": "stage2_report.json",
    "stage1_model": "stage1_model.pkl",
    "stage2_model": "stage2_model.pkl",
    "predictions": "predictions.csv",
    "roc": "roc.csv",
}

STAGE1_CLASS_NAMES = ["disengaged", "others"]
STAGE2_CLASS_NAMES = [
    "malicious", "maybe_malicious", "naive_self_corrector", "informed_sharer",
]


class DataError(ValueError):
    pass


def art(workdir, name) -> str:
    return os.path.join(workdir, ARTIFACTS[name])


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def run_build_graph(edges_path, workdir) -> dict:
    edges = ingest.load_edges(edges_path)
    graph = build_graph(edges)
    os.makedirs(workdir, exist_ok=True)
    graph.save(art(workdir, "graph"))
    return {"n_nodes": graph.n_nodes, "n_edges": graph.n_edges,
            "dropped_self_loops": graph.dropped_self_loops}


def run_label(edges_path, events_path, workdir) -> dict:
    edges = ingest.load_edges(edges_path)
    events = ingest.load_events(events_path)
    if not events:
        raise DataError(f"{events_path}: no events")
    followers = ingest.followers_map(edges)
    known = set()
    for a, b in edges:
        known.add(a)
        known.add(b)
    exposures, exp_stats = ingest.derive_exposures(events, followers, known)
    shares = [ev for ev in events if ev.user_id in known]
    labeled, stats = labeler.label_corpus(exposures, shares)
    os.makedirs(workdir, exist_ok=True)
    labeler.write_labels_csv(labeled, art(workdir, "labels"))
    meta = {"as_of": max(ev.time for ev in events), **exp_stats}
    _write_json(meta, art(workdir, "meta"))
    return {**stats, **exp_stats}


def run_embed(workdir, cfg: embed_mod.TrainConfig, progress=False) -> dict:
    graph = FollowGraph.load(art(workdir, "graph"))
    result = embed_mod.train_line2(graph, cfg, progress=progress)
    embed_mod.export_embeddings(result.vertex, graph.ids,
                                art(workdir, "embeddings"))
    return {
        "n_nodes": graph.n_nodes,
        "dim": cfg.dim,
        "n_untrained": result.n_untrained,
        "final_loss": result.chunk_losses[-1] if result.chunk_losses else None,
    }


def _load_labeled(workdir):
    labeled = labeler.read_labels_csv(art(workdir, "labels"))
    if not labeled:
        raise DataError("labels.csv is empty")
    return labeled


def _load_embeddings(workdir):
    matrix, ids = embed_mod.import_embeddings(art(workdir, "embeddings"))
    return matrix, {u: i for i, u in enumerate(ids)}


def _load_profiles(workdir, profiles_path):
    meta = _read_json(art(workdir, "meta"))
    return ingest.load_profiles(profiles_path, as_of=meta["as_of"])


def run_features(workdir, profiles_path) -> dict:
    """Convenience export of the fused (unnormalized) feature matrix for the
    labeled users, plus a scaler fitted on all rows."""
    labeled = _load_labeled(workdir)
    matrix, row_of = _load_embeddings(workdir)
    profiles = _load_profiles(workdir, profiles_path)
    users = [lu.user_id for lu in labeled]
    fused = feat_mod.fuse(matrix, row_of, profiles, users)
    feat_mod.write_features_csv(fused, users, art(workdir, "features"))
    scaler = feat_mod.normalize_fit(fused)
    scaler.save(art(workdir, "scaler"))
    return {"n_rows": len(users), "n_columns": int(fused.shape[1])}


def run_stage1(workdir, spec: ModelSpec, seed: int, k_folds: int = 5,
               undersample_target: int | None = None) -> dict:
    """Binary disengaged-vs-others classification on embedding features.

    The disengaged class is undersampled once before CV (default target:
    the others count)."""
    labeled = _load_labeled(workdir)
    matrix, row_of = _load_embeddings(workdir)
    users = [lu.user_id for lu in labeled]
    missing = [u for u in users if u not in row_of]
    if missing:
        raise DataError(
            f"{len(missing)} labeled users missing embeddings (first: {missing[0]!r})")
    X = np.vstack([matrix[row_of[u]] for u in users])
    y = np.array([0 if lu.final_label is labeler.BehaviorLabel.DISENGAGED else 1
                  for lu in labeled])
    n_others = int(np.sum(y == 1))
    n_dis = int(np.sum(y == 0))
    if n_others == 0 or n_dis == 0:
        raise DataError("stage 1 needs both disengaged and non-disengaged users")
    target = undersample_target if undersample_target is not None else n_others
    target = min(target, n_dis)
    X, y, kept = undersample(X, y, class_id=0, target_n=target, seed=seed)
    kept_users = [users[i] for i in kept]

    report = evaluate(spec, X, y, K=k_folds, resampling="none", seed=seed,
                      class_names=STAGE1_CLASS_NAMES)
    report["undersampled_disengaged_to"] = target
    _write_json(report, art(workdir, "stage1_report"))
    with open(art(workdir, "roc"), "w", encoding="utf-8") as fh:
        fh.write("fpr,tpr,threshold\n")
        roc = report["roc"]
        for f, t, th in zip(roc["fpr"], roc["tpr"], roc["thresholds"]):
            fh.write(f"{f},{t},{th}\n")

    # final model on the full (undersampled) stage-1 dataset
    scaler = feat_mod.normalize_fit(X)
    model = make_model(spec)
    model.fit(feat_mod.normalize_apply(scaler, X), y)
    with open(art(workdir, "stage1_model"), "wb") as fh:
        pickle.dump({"scaler": scaler, "model": model,
                     "class_names": STAGE1_CLASS_NAMES,
                     "train_users": kept_users}, fh)
    return report


def run_stage2(workdir, profiles_path, spec: ModelSpec, seed: int,
               k_folds: int = 10, resampling: str = "none") -> dict:
    """Four-class classification of the non-disengaged users on fused
    embedding + profile features; both baselines are always evaluated."""
    labeled = _load_labeled(workdir)
    matrix, row_of = _load_embeddings(workdir)
    profiles = _load_profiles(workdir, profiles_path)
    sub = [lu for lu in labeled
           if lu.final_label is not labeler.BehaviorLabel.DISENGAGED]
    if not sub:
        raise DataError("no non-disengaged users for stage 2")
    users = [lu.user_id for lu in sub]
    X = feat_mod.fuse(matrix, row_of, profiles, users)
    y = np.array([lu.final_label.code for lu in sub])
    names = [STAGE2_CLASS_NAMES[c - 1] for c in sorted(set(y.tolist()))]

    report = evaluate(spec, X, y, K=k_folds, resampling=resampling, seed=seed,
                      class_names=names)
    report["baselines"] = {
        "majority": evaluate(ModelSpec(kind="majority_baseline", seed=seed),
                             X, y, K=k_folds, seed=seed, class_names=names),
        "random": evaluate(ModelSpec(kind="random_baseline", seed=seed),
                           X, y, K=k_folds, seed=seed, class_names=names),
    }
    _write_json(report, art(workdir, "stage2_report"))

    scaler = feat_mod.normalize_fit(X)
    model = make_model(spec)
    if resampling == "smote":
        from .ml.resample import smote
        Xn = feat_mod.normalize_apply(scaler, X)
        Xs, ys = smote(Xn, y, seed=seed)
        model.fit(Xs, ys)
    else:
        model.fit(feat_mod.normalize_apply(scaler, X), y)
    with open(art(workdir, "stage2_model"), "wb") as fh:
        pickle.dump({"scaler": scaler, "model": model,
                     "class_names": STAGE2_CLASS_NAMES}, fh)
    return report


def predict_users(workdir, profiles_path, user_ids: list[str]) -> list[dict]:
    """Route users through stage 1 and, for predicted non-disengaged, stage 2.

    Users absent from the embedding matrix come back as error rows."""
    with open(art(workdir, "stage1_model"), "rb") as fh:
        s1 = pickle.load(fh)
    with open(art(workdir, "stage2_model"), "rb") as fh:
        s2 = pickle.load(fh)
    matrix, row_of = _load_embeddings(workdir)
    profiles = _load_profiles(workdir, profiles_path)

    rows = []
    for user in user_ids:
        if user not in row_of:
            rows.append({"user_id": user, "predicted_class": "error",
                         "stage1_score": ""})
            continue
        emb = matrix[row_of[user]][None, :]
        X1 = feat_mod.normalize_apply(s1["scaler"], emb)
        score = float(s1["model"].predict_scores(X1)[0, 1])
        pred1 = int(s1["model"].predict(X1)[0])
        if pred1 == 0:
            rows.append({"user_id": user, "predicted_class": "disengaged",
                         "stage1_score": f"{score:.6f}"})
            continue
        fused = feat_mod.fuse(matrix, row_of, profiles, [user])
        X2 = feat_mod.normalize_apply(s2["scaler"], fused)
        pred2 = int(s2["model"].predict(X2)[0])
        rows.append({"user_id": user,
                     "predicted_class": STAGE2_CLASS_NAMES[pred2 - 1],
                     "stage1_score": f"{score:.6f}"})
    with open(art(workdir, "predictions"), "w", encoding="utf-8") as fh:
        fh.write("user_id,predicted_class,stage1_score\n")
        for row in rows:
            fh.write(f"{row['user_id']},{row['predicted_class']},{row['stage1_score']}\n")
    return rows
