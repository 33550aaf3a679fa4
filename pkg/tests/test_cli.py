"""CLI subcommands chained end to end on a synthetic corpus."""

import json
import os

import pytest

from spreaderkit.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Run simulate -> label -> build-graph -> embed -> stage1 -> stage2 once."""
    wd = str(tmp_path_factory.mktemp("run"))
    cfgfile = os.path.join(wd, "run.cfg")
    with open(cfgfile, "w") as fh:
        fh.write(f"""
seed = 11
workdir = {wd}
edges = {wd}/edges.tsv
events = {wd}/events.jsonl
profiles = {wd}/profiles.csv
synth.n_per_class = 60
synth.n_news_pairs = 2
synth.p_in = 0.08
synth.p_out = 0.003
embed.dim = 8
embed.total_samples = 400000
stage2.model = bagged_trees
stage2.n_estimators = 20
stage2.k_folds = 5
stage2.resampling = smote
""")
    for cmd in ("simulate", "label", "build-graph", "embed", "stage1", "stage2"):
        assert main([cmd, "--config", cfgfile]) == EXIT_OK, cmd
    return wd, cfgfile


def test_artifacts_exist(workdir):
    wd, _ = workdir
    for name in ("labels.csv", "graph.bin", "embeddings.csv",
                 "stage1_report.json", "stage2_report.json", "roc.csv",
                 "stage1_model.pkl", "stage2_model.pkl"):
        assert os.path.exists(os.path.join(wd, name)), name


def test_stage1_report_contents(workdir):
    wd, _ = workdir
    with open(os.path.join(wd, "stage1_report.json")) as fh:
        report = json.load(fh)
    assert report["class_names"] == ["disengaged", "others"]
    assert 0.5 <= report["accuracy"] <= 1.0
    assert "roc" in report and 0.0 <= report["roc"]["auc"] <= 1.0


def test_stage2_report_has_baselines(workdir):
    wd, _ = workdir
    with open(os.path.join(wd, "stage2_report.json")) as fh:
        report = json.load(fh)
    assert set(report["baselines"]) == {"majority", "random"}
    assert "disengaged" not in report["per_class"]
    assert report["k_folds"] == 5


def test_features_subcommand(workdir):
    wd, cfgfile = workdir
    assert main(["features", "--config", cfgfile]) == EXIT_OK
    assert os.path.exists(os.path.join(wd, "features.csv"))
    assert os.path.exists(os.path.join(wd, "scaler.json"))


def test_predict_routing(workdir):
    wd, cfgfile = workdir
    users_file = os.path.join(wd, "query_users.txt")
    with open(users_file, "w") as fh:
        fh.write("u00001\nu00150\nnosuchuser\n")
    assert main(["predict", "--config", cfgfile,
                 "--set", f"users={users_file}"]) == EXIT_OK
    with open(os.path.join(wd, "predictions.csv")) as fh:
        lines = fh.read().strip().splitlines()
    assert lines[0] == "user_id,predicted_class,stage1_score"
    rows = {l.split(",")[0]: l.split(",") for l in lines[1:]}
    assert rows["nosuchuser"][1] == "error"
    for user in ("u00001", "u00150"):
        cls = rows[user][1]
        if cls == "disengaged":
            assert rows[user][2] != ""  # routed out at stage 1
        else:
            assert cls in ("malicious", "maybe_malicious",
                           "naive_self_corrector", "informed_sharer")


def test_report_renders_figures(workdir):
    wd, cfgfile = workdir
    assert main(["report", "--config", cfgfile]) == EXIT_OK
    for name in ("roc.png", "stage2_per_class.png", "label_distribution.png",
                 "report.csv"):
        assert os.path.exists(os.path.join(wd, name)), name


def test_stage1_rerun_is_byte_identical(workdir):
    wd, cfgfile = workdir
    path = os.path.join(wd, "stage1_report.json")
    with open(path, "rb") as fh:
        before = fh.read()
    assert main(["stage1", "--config", cfgfile]) == EXIT_OK
    with open(path, "rb") as fh:
        assert fh.read() == before


def test_missing_seed_is_config_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("workdir = /tmp/x\n")
    assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG


def test_bad_model_kind_is_config_error(workdir, tmp_path):
    wd, cfgfile = workdir
    assert main(["stage2", "--config", cfgfile,
                 "--set", "stage2.model=svm"]) == EXIT_CONFIG


def test_missing_data_file_is_data_error(tmp_path):
    assert main(["label", "--set", "seed=1",
                 "--set", f"workdir={tmp_path}",
                 "--set", f"edges={tmp_path}/absent.tsv",
                 "--set", f"events={tmp_path}/absent.jsonl"]) == EXIT_DATA


def test_malformed_config_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("seed 3\n")
    assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG
