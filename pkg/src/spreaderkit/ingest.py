"""Loading of edge lists, profile tables and share-event logs, plus
derivation of per-user exposure timelines.

Exposure policy: a share of message X at time t exposes every follower of
the sharer at time t; if several followees shared X the earliest share time
wins; a user who shared X themselves is exposed no later than their first
own share of X. Exactly one exposure per (user, news, message).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable

MSG_MISINFO = "m"
MSG_REFUTATION = "f"

PROFILE_COLUMNS = [
    "user_id",
    "follower_count",
    "friend_count",
    "statuses_count",
    "listed_count",
    "verified",
    "protected",
    "account_created_unix",
]

# numeric profile feature order used downstream (account age replaces the
# raw creation timestamp)
PROFILE_FEATURES = [
    "follower_count",
    "friend_count",
    "statuses_count",
    "listed_count",
    "verified",
    "protected",
    "account_age_days",
]


class ParseError(ValueError):
    """Malformed input file."""


@dataclass(frozen=True)
class ShareEvent:
    user_id: str
    news_id: int
    message: str  # "m" or "f"
    time: int
    is_source: bool = False


@dataclass(frozen=True)
class ExposureEvent:
    user_id: str
    news_id: int
    message: str
    time: int


@dataclass
class UserProfile:
    user_id: str
    follower_count: float = 0.0
    friend_count: float = 0.0
    statuses_count: float = 0.0
    listed_count: float = 0.0
    verified: int = 0
    protected: int = 0
    account_age_days: float = 0.0


def load_edges(path) -> list[tuple[str, str]]:
    """Read a two-column TSV of ``follower<TAB>followee`` rows.

    Returns a deduplicated edge list in first-seen order. Raises
    :class:`ParseError` on malformed rows or an empty file.
    """
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(
                    f"{path}: line {lineno}: expected 2 tab-separated columns, "
                    f"got {len(parts)}"
                )
            edge = (parts[0], parts[1])
            if edge in seen:
                continue
            seen.add(edge)
            edges.append(edge)
    if not edges:
        raise ParseError(f"{path}: no edges found")
    return edges


def load_events(path) -> list[ShareEvent]:
    """Read share events from a JSONL file.

    Each line carries keys ``user``, ``news``, ``msg`` ("m"/"f"),
    ``time`` and ``source``.
    """
    events: list[ShareEvent] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                msg = obj["msg"]
                if msg not in (MSG_MISINFO, MSG_REFUTATION):
                    raise ValueError(f"bad msg {msg!r}")
                events.append(
                    ShareEvent(
                        user_id=str(obj["user"]),
                        news_id=int(obj["news"]),
                        message=msg,
                        time=int(obj["time"]),
                        is_source=bool(obj.get("source", False)),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    return events


def load_profiles(path, as_of: int) -> dict[str, UserProfile]:
    """Read the profile CSV; ``as_of`` is the unix time used to convert
    account creation timestamps into ages in days.
    """
    profiles: dict[str, UserProfile] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != PROFILE_COLUMNS:
            raise ParseError(
                f"{path}: expected header {PROFILE_COLUMNS}, got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                created = float(row["account_created_unix"])
                prof = UserProfile(
                    user_id=row["user_id"],
                    follower_count=float(row["follower_count"]),
                    friend_count=float(row["friend_count"]),
                    statuses_count=float(row["statuses_count"]),
                    listed_count=float(row["listed_count"]),
                    verified=int(row["verified"]),
                    protected=int(row["protected"]),
                    account_age_days=max(0.0, (as_of - created) / 86400.0),
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
            profiles[prof.user_id] = prof
    return profiles


def derive_exposures(
    events: Iterable[ShareEvent],
    followers_of: dict[str, list[str]],
    known_users: set[str] | None = None,
) -> tuple[list[ExposureEvent], dict]:
    """Derive one exposure per (user, news, message) from share events.

    ``followers_of`` maps a user to the users who follow them (i.e. who see
    their shares). ``known_users`` is the graph's node set; shares by ids
    outside it are skipped and counted. Returns the exposure list plus a
    stats dict (``skipped_unknown_sharers``).

    The result is a pure function of the event *set*: input ordering does
    not matter because only per-key minima are kept.
    """
    if known_users is None:
        known_users = set(followers_of)
    best: dict[tuple[str, int, str], int] = {}
    skipped = 0

    def offer(user: str, news: int, msg: str, t: int) -> None:
        key = (user, news, msg)
        prev = best.get(key)
        if prev is None or t < prev:
            best[key] = t

    for ev in events:
        if ev.user_id not in known_users:
            skipped += 1
            continue
        # own share implies the sharer saw the message by then
        offer(ev.user_id, ev.news_id, ev.message, ev.time)
        for follower in followers_of.get(ev.user_id, ()):
            offer(follower, ev.news_id, ev.message, ev.time)

    exposures = [
        ExposureEvent(user_id=u, news_id=n, message=m, time=t)
        for (u, n, m), t in best.items()
    ]
    exposures.sort(key=lambda e: (e.news_id, e.message, e.time, e.user_id))
    return exposures, {"skipped_unknown_sharers": skipped}


def followers_map(edges: Iterable[tuple[str, str]]) -> dict[str, list[str]]:
    """Invert follower->followee edges into followee -> [followers]."""
    out: dict[str, list[str]] = {}
    for follower, followee in edges:
        out.setdefault(followee, []).append(follower)
    return out
