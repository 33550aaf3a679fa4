"""Command-line interface.

Every pipeline stage is a subcommand. Settings come from a flat key=value
config file (``--config``), overridable per-key with ``--set key=value``;
``seed`` is mandatory in the config. Exit codes: 0 ok, 2 config error,
3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import synth
from .embed import ConfigError, TrainConfig
from .graph import GraphError
from .ingest import ParseError
from .ml import ModelSpec
from .pipeline import DataError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


class ConfigFileError(ValueError):
    pass


def _coerce(value: str):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def load_config(path: str | None, overrides: list[str]) -> dict:
    cfg: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                for lineno, raw in enumerate(fh, start=1):
                    line = raw.split("#", 1)[0].strip()
                    if not line:
                        continue
                    if "=" not in line:
                        raise ConfigFileError(
                            f"{path}: line {lineno}: expected key = value")
                    key, _, value = line.partition("=")
                    cfg[key.strip()] = _coerce(value.strip())
        except OSError as exc:
            raise ConfigFileError(str(exc)) from exc
    for item in overrides:
        if "=" not in item:
            raise ConfigFileError(f"--set {item!r}: expected key=value")
        key, _, value = item.partition("=")
        cfg[key.strip()] = _coerce(value.strip())
    if "seed" not in cfg:
        raise ConfigFileError("config must define 'seed'")
    if not isinstance(cfg["seed"], int):
        raise ConfigFileError("'seed' must be an integer")
    return cfg


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigFileError(f"config missing keys: {', '.join(missing)}")


def _model_spec(cfg: dict, prefix: str, default_kind: str) -> ModelSpec:
    kwargs = {"kind": cfg.get(f"{prefix}.model", default_kind),
              "seed": cfg["seed"]}
    for key, name in [("k", "k"), ("n_estimators", "n_estimators"),
                      ("max_depth", "max_depth"), ("lr", "lr"),
                      ("epochs", "epochs"), ("l2", "l2"),
                      ("class_weight", "class_weight")]:
        val = cfg.get(f"{prefix}.{name}")
        if val is not None:
            kwargs[key] = val
    try:
        return ModelSpec(**kwargs)
    except ValueError as exc:
        raise ConfigFileError(str(exc)) from exc


def cmd_simulate(cfg: dict) -> dict:
    _require(cfg, "workdir")
    scfg = synth.SynthConfig(
        n_per_class=cfg.get("synth.n_per_class", 100),
        n_news_pairs=cfg.get("synth.n_news_pairs", 3),
        p_in=cfg.get("synth.p_in", 0.05),
        p_out=cfg.get("synth.p_out", 0.002),
        noise=cfg.get("synth.noise", 0.0),
        seed_follow_prob=cfg.get("synth.seed_follow_prob", 0.9),
        seed=cfg["seed"],
    )
    result = synth.generate(scfg, cfg["workdir"])
    return {"n_edges": result.n_edges, "n_events": result.n_events,
            **result.stats}


def cmd_label(cfg: dict) -> dict:
    from .pipeline import run_label
    _require(cfg, "edges", "events", "workdir")
    return run_label(cfg["edges"], cfg["events"], cfg["workdir"])


def cmd_build_graph(cfg: dict) -> dict:
    from .pipeline import run_build_graph
    _require(cfg, "edges", "workdir")
    return run_build_graph(cfg["edges"], cfg["workdir"])


def cmd_embed(cfg: dict) -> dict:
    from .pipeline import run_embed
    _require(cfg, "workdir")
    tcfg = TrainConfig(
        dim=cfg.get("embed.dim", 16),
        total_samples=cfg.get("embed.total_samples", 1_000_000),
        negatives=cfg.get("embed.negatives", 5),
        initial_lr=cfg.get("embed.initial_lr", 0.025),
        seed=cfg["seed"],
        n_workers=cfg.get("embed.workers", 1),
    )
    return run_embed(cfg["workdir"], tcfg, progress=cfg.get("verbose", False))


def cmd_features(cfg: dict) -> dict:
    from .pipeline import run_features
    _require(cfg, "workdir", "profiles")
    return run_features(cfg["workdir"], cfg["profiles"])


def cmd_stage1(cfg: dict) -> dict:
    from .pipeline import run_stage1
    _require(cfg, "workdir")
    spec = _model_spec(cfg, "stage1", "logistic_regression_ovr")
    target = cfg.get("stage1.undersample_target")
    report = run_stage1(cfg["workdir"], spec, seed=cfg["seed"],
                        k_folds=cfg.get("stage1.k_folds", 5),
                        undersample_target=target)
    return {"accuracy": report["accuracy"], "auc": report["roc"]["auc"]}


def cmd_stage2(cfg: dict) -> dict:
    from .pipeline import run_stage2
    _require(cfg, "workdir", "profiles")
    spec = _model_spec(cfg, "stage2", "bagged_trees")
    report = run_stage2(cfg["workdir"], cfg["profiles"], spec,
                        seed=cfg["seed"],
                        k_folds=cfg.get("stage2.k_folds", 10),
                        resampling=cfg.get("stage2.resampling", "none"))
    return {"accuracy": report["accuracy"],
            "weighted_f1": report["weighted_f1"]}


def cmd_predict(cfg: dict) -> dict:
    from .pipeline import predict_users
    _require(cfg, "workdir", "profiles", "users")
    with open(cfg["users"], encoding="utf-8") as fh:
        user_ids = [line.strip() for line in fh if line.strip()]
    rows = predict_users(cfg["workdir"], cfg["profiles"], user_ids)
    n_err = sum(1 for r in rows if r["predicted_class"] == "error")
    return {"n_predicted": len(rows) - n_err, "n_errors": n_err}


def cmd_report(cfg: dict) -> dict:
    from .plots import render_report
    _require(cfg, "workdir")
    return {"files": render_report(cfg["workdir"])}


COMMANDS = {
    "simulate": cmd_simulate,
    "label": cmd_label,
    "build-graph": cmd_build_graph,
    "embed": cmd_embed,
    "features": cmd_features,
    "stage1": cmd_stage1,
    "stage2": cmd_stage2,
    "predict": cmd_predict,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spreaderkit",
        description="Label, embed and classify misinformation-spreading behavior.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.overrides)
    except ConfigFileError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = COMMANDS[args.command](cfg)
    except (ConfigFileError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, GraphError, DataError, synth.SynthError,
            FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(json.dumps({"command": args.command, **summary}, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
