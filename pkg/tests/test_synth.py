"""Synthetic corpus generator: planted-class recovery and bookkeeping."""

import os

import pytest

from spreaderkit import ingest, labeler, synth
from spreaderkit.labeler import LABEL_BY_TAG, aggregate_labels
from spreaderkit.synth import SynthConfig, SynthError, generate, read_truth


def run_label(outdir):
    edges = ingest.load_edges(os.path.join(outdir, "edges.tsv"))
    events = ingest.load_events(os.path.join(outdir, "events.jsonl"))
    known = {x for e in edges for x in e}
    exposures, _ = ingest.derive_exposures(events, ingest.followers_map(edges),
                                           known)
    shares = [e for e in events if e.user_id in known]
    return labeler.label_corpus(exposures, shares)


def test_invalid_configs():
    with pytest.raises(SynthError):
        SynthConfig(p_in=0.01, p_out=0.05).validate()
    with pytest.raises(SynthError):
        SynthConfig(noise=0.7).validate()
    with pytest.raises(SynthError):
        SynthConfig(seed_follow_prob=0.0).validate()


def test_noise_free_recovery(tmp_path):
    cfg = SynthConfig(n_per_class=40, n_news_pairs=2, seed=5)
    result = generate(cfg, tmp_path)
    labeled, stats = run_label(tmp_path)
    truth = read_truth(tmp_path / "truth.csv")
    by_user = {lu.user_id: lu for lu in labeled}
    for user, (cls, pairs) in truth.items():
        if pairs:
            assert by_user[user].final_label.tag == cls, user
    # labeled user count equals the generator's fully-exposed count
    eligible = {u for u, (_, pairs) in truth.items() if pairs}
    assert eligible == {u for u in by_user if u in truth}


def test_planted_disengaged_never_share(tmp_path):
    cfg = SynthConfig(n_per_class=30, n_news_pairs=2, seed=9)
    result = generate(cfg, tmp_path)
    events = ingest.load_events(tmp_path / "events.jsonl")
    disengaged = {u for u, c in result.planted.items() if c == "disengaged"}
    assert all(e.user_id not in disengaged for e in events)


def test_one_source_per_news_message(tmp_path):
    generate(SynthConfig(n_per_class=20, n_news_pairs=3, seed=2), tmp_path)
    events = ingest.load_events(tmp_path / "events.jsonl")
    sources = [(e.news_id, e.message) for e in events if e.is_source]
    assert sorted(sources) == sorted(
        (p, m) for p in range(3) for m in ("m", "f"))


def test_noisy_multipair_aggregation_matches_bruteforce(tmp_path):
    cfg = SynthConfig(n_per_class=40, n_news_pairs=4, noise=0.3, seed=13)
    result = generate(cfg, tmp_path)
    labeled, _ = run_label(tmp_path)
    by_user = {lu.user_id: lu for lu in labeled}
    checked = 0
    for (user, pair), cls in result.effective.items():
        assert by_user[user].per_pair_labels  # user acted, must be labeled
    for user, lu in by_user.items():
        if user not in result.planted:
            continue
        expected = aggregate_labels(
            [LABEL_BY_TAG[result.effective[(user, p)]]
             for p, _ in lu.per_pair_labels])
        assert lu.final_label == expected
        if len(lu.per_pair_labels) > 1:
            checked += 1
    assert checked > 20


def test_per_pair_labels_match_effective_scripts(tmp_path):
    cfg = SynthConfig(n_per_class=30, n_news_pairs=3, noise=0.2, seed=21)
    result = generate(cfg, tmp_path)
    labeled, _ = run_label(tmp_path)
    for lu in labeled:
        if lu.user_id not in result.planted:
            continue
        for pair, lab in lu.per_pair_labels:
            assert lab.tag == result.effective[(lu.user_id, pair)]


def test_profiles_cover_all_accounts(tmp_path):
    result = generate(SynthConfig(n_per_class=10, n_news_pairs=2, seed=3),
                      tmp_path)
    profiles = ingest.load_profiles(tmp_path / "profiles.csv",
                                    as_of=synth.BASE_TIME)
    for user in result.users:
        assert user in profiles
        assert profiles[user].account_age_days > 0
