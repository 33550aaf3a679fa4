"""Synthetic follower graphs and share-event logs with planted behavior.

The follower graph is a directed stochastic block model keyed by planted
class. Each news pair has two scaffolding source accounts (one per message)
that users follow with a configurable probability; cascades then propagate
through the block structure. Every user acts out the script of its planted
class once exposed to both messages of a pair, with probability ``noise`` of
acting as a uniformly random other class.

Scripts fire at T = max(exposure times) of a pair:

  malicious              share m at T+1
  maybe_malicious        share f at T+1, share m at T+2 (last share is m)
  naive_self_corrector   share m at T+1, share f at T+2
  informed_sharer        share f at T+1
  disengaged             nothing

Emitted files use exactly the ingest formats, plus truth.csv with the
planted class and the news ids of pairs the user was exposed to in full.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

import numpy as np

CLASS_ORDER = [
    "malicious",
    "maybe_malicious",
    "naive_self_corrector",
    "informed_sharer",
    "disengaged",
]

BASE_TIME = 1_700_000_000
PAIR_SPACING = 100_000
REFUTATION_DELAY = 50  # source f share follows source m share


class SynthError(ValueError):
    pass


@dataclass
class SynthConfig:
    n_per_class: int = 100
    n_news_pairs: int = 3
    p_in: float = 0.05
    p_out: float = 0.002
    noise: float = 0.0          # per (user, pair) chance of off-script action
    seed_follow_prob: float = 0.9
    seed: int = 0
    profile_shift: float = 0.4  # per-class lognormal location shift

    def validate(self) -> None:
        if self.n_per_class <= 0 or self.n_news_pairs <= 0:
            raise SynthError("n_per_class and n_news_pairs must be positive")
        if not (self.p_in > self.p_out >= 0):
            raise SynthError("need p_in > p_out >= 0")
        if not (0 <= self.noise < 0.5):
            raise SynthError("noise must be in [0, 0.5)")
        if self.seed_follow_prob <= 0:
            raise SynthError(
                "seed_follow_prob must be positive, otherwise nobody is exposed")


@dataclass
class SynthResult:
    users: list[str]
    planted: dict[str, str]                      # user -> class tag
    exposed_pairs: dict[str, list[int]]          # user -> news ids, both seen
    effective: dict[tuple[str, int], str]        # (user, news) -> acted script
    n_edges: int = 0
    n_events: int = 0
    stats: dict = field(default_factory=dict)


def _scripted_shares(cls: str, t_both: int):
    if cls == "malicious":
        return [("m", t_both + 1)]
    if cls == "maybe_malicious":
        return [("f", t_both + 1), ("m", t_both + 2)]
    if cls == "naive_self_corrector":
        return [("m", t_both + 1), ("f", t_both + 2)]
    if cls == "informed_sharer":
        return [("f", t_both + 1)]
    return []


def generate(cfg: SynthConfig, outdir) -> SynthResult:
    """Write edges.tsv, events.jsonl, profiles.csv and truth.csv under
    ``outdir`` and return the generator's bookkeeping."""
    import os

    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    os.makedirs(outdir, exist_ok=True)

    users = [f"u{i:05d}" for i in range(cfg.n_per_class * len(CLASS_ORDER))]
    planted = {
        u: CLASS_ORDER[i // cfg.n_per_class] for i, u in enumerate(users)
    }
    class_of_idx = np.repeat(np.arange(len(CLASS_ORDER)), cfg.n_per_class)

    # directed SBM over the class blocks
    n = len(users)
    edges: list[tuple[str, str]] = []
    same = class_of_idx[:, None] == class_of_idx[None, :]
    probs = np.where(same, cfg.p_in, cfg.p_out)
    np.fill_diagonal(probs, 0.0)
    draws = rng.random((n, n)) < probs
    for i, j in zip(*np.nonzero(draws)):
        edges.append((users[i], users[j]))

    # seed accounts per pair; users follow them with seed_follow_prob
    seeds = {}
    for p in range(cfg.n_news_pairs):
        seeds[(p, "m")] = f"seed{p:03d}m"
        seeds[(p, "f")] = f"seed{p:03d}f"
        for msg in ("m", "f"):
            follow = rng.random(n) < cfg.seed_follow_prob
            for i in np.nonzero(follow)[0]:
                edges.append((users[i], seeds[(p, msg)]))

    followers_of: dict[str, list[str]] = {}
    for a, b in edges:
        followers_of.setdefault(b, []).append(a)

    # cascade simulation; exposures and scripted shares per pair
    events = []  # (user, news, msg, time, is_source)
    exposed_pairs: dict[str, list[int]] = {u: [] for u in users}
    effective: dict[tuple[str, int], str] = {}
    for p in range(cfg.n_news_pairs):
        t0 = BASE_TIME + p * PAIR_SPACING
        exp: dict[tuple[str, str], int] = {}
        fired: set[str] = set()
        counter = 0
        heap: list[tuple[int, int, str, str, bool]] = []

        def push(t, user, msg, is_source=False):
            nonlocal counter
            heapq.heappush(heap, (t, counter, user, msg, is_source))
            counter += 1

        push(t0, seeds[(p, "m")], "m", True)
        push(t0 + REFUTATION_DELAY, seeds[(p, "f")], "f", True)

        while heap:
            t, _, user, msg, is_source = heapq.heappop(heap)
            events.append((user, p, msg, t, is_source))
            watchers = followers_of.get(user, ())
            for v in [user] + list(watchers):
                key = (v, msg)
                if key in exp:
                    continue
                exp[key] = t
                other = (v, "f" if msg == "m" else "m")
                if other in exp and v in planted and v not in fired:
                    fired.add(v)
                    t_both = max(exp[key], exp[other])
                    cls = planted[v]
                    if cfg.noise > 0 and rng.random() < cfg.noise:
                        others = [c for c in CLASS_ORDER if c != cls]
                        cls = others[int(rng.integers(len(others)))]
                    effective[(v, p)] = cls
                    for smsg, st in _scripted_shares(cls, t_both):
                        push(st, v, smsg)
        for u in users:
            if (u, "m") in exp and (u, "f") in exp:
                exposed_pairs[u].append(p)

    if not any(exposed_pairs.values()):
        raise SynthError("configuration produced zero fully exposed users")

    # profiles: log-normal, location shifted per class
    all_accounts = users + [seeds[k] for k in sorted(seeds)]
    profile_rows = []
    for acct in all_accounts:
        ci = CLASS_ORDER.index(planted[acct]) if acct in planted else 2
        loc = 4.0 + cfg.profile_shift * ci
        profile_rows.append({
            "user_id": acct,
            "follower_count": int(rng.lognormal(loc, 1.0)),
            "friend_count": int(rng.lognormal(loc - 0.5, 1.0)),
            "statuses_count": int(rng.lognormal(loc + 1.0, 1.2)),
            "listed_count": int(rng.lognormal(loc - 3.0, 1.0)),
            "verified": int(rng.random() < 0.05),
            "protected": int(rng.random() < 0.05),
            "account_created_unix": int(
                BASE_TIME - rng.uniform(100, 3000 + 500 * ci) * 86400),
        })

    with open(os.path.join(outdir, "edges.tsv"), "w", encoding="utf-8") as fh:
        for a, b in edges:
            fh.write(f"{a}\t{b}\n")
    events.sort(key=lambda e: (e[3], e[0], e[2]))
    with open(os.path.join(outdir, "events.jsonl"), "w", encoding="utf-8") as fh:
        for user, news, msg, t, is_source in events:
            fh.write(json.dumps({"user": user, "news": news, "msg": msg,
                                 "time": t, "source": is_source}) + "\n")
    with open(os.path.join(outdir, "profiles.csv"), "w", encoding="utf-8") as fh:
        cols = ["user_id", "follower_count", "friend_count", "statuses_count",
                "listed_count", "verified", "protected", "account_created_unix"]
        fh.write(",".join(cols) + "\n")
        for row in profile_rows:
            fh.write(",".join(str(row[c]) for c in cols) + "\n")
    with open(os.path.join(outdir, "truth.csv"), "w", encoding="utf-8") as fh:
        fh.write("user_id,class,exposed_pairs\n")
        for u in users:
            pairs = ";".join(str(p) for p in exposed_pairs[u])
            fh.write(f"{u},{planted[u]},{pairs}\n")

    return SynthResult(
        users=users,
        planted=planted,
        exposed_pairs=exposed_pairs,
        effective=effective,
        n_edges=len(edges),
        n_events=len(events),
        stats={
            "n_users": n,
            "n_fully_exposed": sum(1 for u in users if exposed_pairs[u]),
        },
    )


def read_truth(path) -> dict[str, tuple[str, list[int]]]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            user, cls, pairs = line.split(",")
            ids = [int(x) for x in pairs.split(";")] if pairs else []
            out[user] = (cls, ids)
    return out
