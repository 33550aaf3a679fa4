"""Report rendering: flat CSV metrics plus matplotlib figures."""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .pipeline import art


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def plot_roc(report: dict, path) -> None:
    roc = report["roc"]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(roc["fpr"], roc["tpr"], label=f"AUC = {roc['auc']:.4f}")
    ax.plot([0, 1], [0, 1], linestyle="--", color="gray", label="chance")
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title("Disengaged-vs-others ROC (out-of-fold)")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_per_class(report: dict, path) -> None:
    names = list(report["per_class"].keys())
    metrics = ("precision", "recall", "f1")
    fig, axes = plt.subplots(1, 3, figsize=(12, 4), sharey=True)
    y_pos = range(len(names))
    for ax, metric in zip(axes, metrics):
        vals = [report["per_class"][n][metric] or 0.0 for n in names]
        ax.barh(list(y_pos), vals, color="tab:blue")
        ax.set_yticks(list(y_pos))
        ax.set_yticklabels(names)
        ax.set_xlim(0, 1)
        ax.set_title(metric)
        ax.invert_yaxis()
    fig.suptitle(f"{report['model']}: per-class metrics")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_label_distribution(labels_csv, path) -> None:
    counts: dict[str, int] = {}
    with open(labels_csv, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            tag = line.split(",")[1]
            counts[tag] = counts.get(tag, 0) + 1
    names = sorted(counts)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, [counts[n] for n in names], color="tab:orange")
    ax.set_ylabel("users")
    ax.set_title("Final label distribution")
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _flat_rows(stage: str, report: dict):
    rows = [
        (stage, report["model"], "accuracy", "", report["accuracy"]),
        (stage, report["model"], "weighted_f1", "", report["weighted_f1"]),
    ]
    if "roc" in report:
        rows.append((stage, report["model"], "auc", "", report["roc"]["auc"]))
    for name, m in report["per_class"].items():
        for metric in ("precision", "recall", "f1"):
            val = m[metric]
            rows.append((stage, report["model"], metric, name,
                         "" if val is None else val))
    return rows


def render_report(workdir) -> list[str]:
    """Write report.csv and PNG figures for whatever artifacts exist.
    Returns the list of files produced."""
    produced = []
    rows = []
    s1_path = art(workdir, "stage1_report")
    s2_path = art(workdir, "stage2_report")
    labels_path = art(workdir, "labels")
    if os.path.exists(s1_path):
        s1 = _load(s1_path)
        rows.extend(_flat_rows("stage1", s1))
        out = os.path.join(workdir, "roc.png")
        plot_roc(s1, out)
        produced.append(out)
    if os.path.exists(s2_path):
        s2 = _load(s2_path)
        rows.extend(_flat_rows("stage2", s2))
        for name, base in s2.get("baselines", {}).items():
            rows.extend(_flat_rows(f"stage2_baseline_{name}", base))
        out = os.path.join(workdir, "stage2_per_class.png")
        plot_per_class(s2, out)
        produced.append(out)
    if os.path.exists(labels_path):
        out = os.path.join(workdir, "label_distribution.png")
        plot_label_distribution(labels_path, out)
        produced.append(out)
    if rows:
        out = os.path.join(workdir, "report.csv")
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stage", "model", "metric", "class", "value"])
            writer.writerows(rows)
        produced.append(out)
    return produced
