"""Behavior labeling.

A user is labelable on a news pair only after being exposed to both the
misinformation (m) and its refutation (f). The label is a function of the
full share history:

  no shares            -> disengaged
  shared f only        -> informed_sharer
  shared m only        -> malicious if any m-share came after both
                          exposures, else maybe_malicious
  shared both          -> naive_self_corrector if the last share is f,
                          maybe_malicious if the last share is m

Multiple per-pair labels collapse to one via a Likert-style median with the
larger middle value taken on even-length ties; disengaged labels are dropped
whenever any non-disengaged label exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class BehaviorLabel(Enum):
    MALICIOUS = 1
    MAYBE_MALICIOUS = 2
    NAIVE_SELF_CORRECTOR = 3
    INFORMED_SHARER = 4
    DISENGAGED = 0  # carries no Likert code

    @property
    def code(self) -> int:
        if self is BehaviorLabel.DISENGAGED:
            raise ValueError("disengaged has no integer code")
        return self.value

    @property
    def tag(self) -> str:
        return self.name.lower()


LABEL_BY_TAG = {lab.tag: lab for lab in BehaviorLabel}
LABEL_BY_CODE = {
    lab.value: lab for lab in BehaviorLabel if lab is not BehaviorLabel.DISENGAGED
}

EXP_M, EXP_F, SHARE_M, SHARE_F = "exp_m", "exp_f", "share_m", "share_f"
EVENT_KINDS = (EXP_M, EXP_F, SHARE_M, SHARE_F)


class TimelineError(ValueError):
    """A share appears without a preceding exposure to the same message."""


@dataclass
class UserTimeline:
    """Time-ordered events of one user on one news pair."""

    user_id: str
    news_id: int
    events: list[tuple[int, str]] = field(default_factory=list)  # (time, kind)

    def kinds(self) -> list[str]:
        return [k for _, k in self.events]


@dataclass
class LabeledUser:
    user_id: str
    per_pair_labels: list[tuple[int, BehaviorLabel]]
    final_label: BehaviorLabel


def label_sequence(kinds: list[str]) -> BehaviorLabel | None:
    """Label an event-kind sequence; None means ineligible (missing an
    exposure to one of the two messages)."""
    seen_m = seen_f = False
    shared_m = shared_f = False
    m_after_both = False
    last_share: str | None = None
    for kind in kinds:
        if kind == EXP_M:
            seen_m = True
        elif kind == EXP_F:
            seen_f = True
        elif kind == SHARE_M:
            if not seen_m:
                raise TimelineError("share of m before exposure to m")
            shared_m = True
            last_share = SHARE_M
            if seen_f:
                m_after_both = True
        elif kind == SHARE_F:
            if not seen_f:
                raise TimelineError("share of f before exposure to f")
            shared_f = True
            last_share = SHARE_F
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    if not (seen_m and seen_f):
        return None
    if not shared_m and not shared_f:
        return BehaviorLabel.DISENGAGED
    if shared_f and not shared_m:
        return BehaviorLabel.INFORMED_SHARER
    if shared_m and not shared_f:
        return (
            BehaviorLabel.MALICIOUS if m_after_both else BehaviorLabel.MAYBE_MALICIOUS
        )
    # shared both: the last action decides
    return (
        BehaviorLabel.NAIVE_SELF_CORRECTOR
        if last_share == SHARE_F
        else BehaviorLabel.MAYBE_MALICIOUS
    )


def label_pair(timeline: UserTimeline) -> BehaviorLabel | None:
    """Label one (user, news pair) timeline. Events must be time-ordered;
    simultaneous events are expected pre-sorted exposures-first, m-first."""
    return label_sequence(timeline.kinds())


def aggregate_labels(labels: list[BehaviorLabel]) -> BehaviorLabel:
    """Collapse per-pair labels into one: drop disengaged unless it is all
    there is, then take the median code, larger middle value on ties."""
    if not labels:
        raise ValueError("aggregate_labels: empty label list")
    active = [lab for lab in labels if lab is not BehaviorLabel.DISENGAGED]
    if not active:
        return BehaviorLabel.DISENGAGED
    codes = sorted(lab.code for lab in active)
    # for even n this picks the larger of the two middle values
    return LABEL_BY_CODE[codes[len(codes) // 2]]


def aggregate_labels_mean(labels: list[BehaviorLabel]) -> BehaviorLabel:
    """Mean-based alternative aggregation (rounded up), exposed so the
    median/mean disagreement rate can be recomputed on any corpus."""
    if not labels:
        raise ValueError("aggregate_labels_mean: empty label list")
    active = [lab for lab in labels if lab is not BehaviorLabel.DISENGAGED]
    if not active:
        return BehaviorLabel.DISENGAGED
    mean = sum(lab.code for lab in active) / len(active)
    return LABEL_BY_CODE[min(4, math.ceil(mean))]


def build_timelines(exposures, shares) -> dict[tuple[str, int], UserTimeline]:
    """Merge exposures and shares into per-(user, news) timelines.

    Tie-break at equal timestamps: exposures before shares, m before f.
    """
    order = {EXP_M: 0, EXP_F: 1, SHARE_M: 2, SHARE_F: 3}
    timelines: dict[tuple[str, int], UserTimeline] = {}

    def add(user: str, news: int, t: int, kind: str) -> None:
        key = (user, news)
        tl = timelines.get(key)
        if tl is None:
            tl = timelines[key] = UserTimeline(user_id=user, news_id=news)
        tl.events.append((t, kind))

    for exp in exposures:
        add(exp.user_id, exp.news_id, exp.time, EXP_M if exp.message == "m" else EXP_F)
    for sh in shares:
        add(sh.user_id, sh.news_id, sh.time, SHARE_M if sh.message == "m" else SHARE_F)
    for tl in timelines.values():
        tl.events.sort(key=lambda ev: (ev[0], order[ev[1]]))
    return timelines


def label_corpus(exposures, shares) -> tuple[list[LabeledUser], dict]:
    """Label every user eligible on at least one news pair.

    Returns the labeled users (sorted by user id) and a stats dict with
    per-class counts and the median-vs-mean disagreement count.
    """
    timelines = build_timelines(exposures, shares)
    per_user: dict[str, list[tuple[int, BehaviorLabel]]] = {}
    for (user, news), tl in sorted(timelines.items()):
        lab = label_pair(tl)
        if lab is None:
            continue
        per_user.setdefault(user, []).append((news, lab))

    labeled: list[LabeledUser] = []
    mean_median_diff = 0
    class_counts = {lab.tag: 0 for lab in BehaviorLabel}
    for user in sorted(per_user):
        pairs = per_user[user]
        labs = [lab for _, lab in pairs]
        final = aggregate_labels(labs)
        if len(labs) > 1 and aggregate_labels_mean(labs) is not final:
            mean_median_diff += 1
        class_counts[final.tag] += 1
        labeled.append(LabeledUser(user_id=user, per_pair_labels=pairs, final_label=final))
    stats = {
        "n_labeled": len(labeled),
        "class_counts": class_counts,
        "multilabel_users": sum(1 for lu in labeled if len(lu.per_pair_labels) > 1),
        "mean_vs_median_changed": mean_median_diff,
    }
    return labeled, stats


def write_labels_csv(labeled: list[LabeledUser], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("user_id,final_label,n_pairs,per_pair_labels\n")
        for lu in labeled:
            pairs = ";".join(f"{news}={lab.tag}" for news, lab in lu.per_pair_labels)
            fh.write(f"{lu.user_id},{lu.final_label.tag},{len(lu.per_pair_labels)},{pairs}\n")


def read_labels_csv(path) -> list[LabeledUser]:
    labeled = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "user_id,final_label,n_pairs,per_pair_labels":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            user, final, _n, pairs_str = line.split(",", 3)
            pairs = []
            if pairs_str:
                for item in pairs_str.split(";"):
                    news, tag = item.split("=")
                    pairs.append((int(news), LABEL_BY_TAG[tag]))
            labeled.append(
                LabeledUser(user_id=user, per_pair_labels=pairs,
                            final_label=LABEL_BY_TAG[final])
            )
    return labeled
