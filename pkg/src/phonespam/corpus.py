"""Corpus loading, normalization, and indexing.

Input files:
    tweets.jsonl  one JSON object per line: id, user_id, text, created_at,
                  and optional precomputed phones / urls / hashtags lists.
    users.jsonl   one JSON object per line: user_id, followers_count,
                  friends_count, suspended, optional annotated_label.
    edges.csv     header ``follower,followee``, one directed edge per line.

When a tweet omits the precomputed token lists they are extracted from the
text with normalized-regex stand-ins. A corpus is immutable after load and
safe to share across worker threads.
"""

from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, NamedTuple

__all__ = [
    "CorpusError",
    "TweetRecord",
    "UserRecord",
    "FollowerEdge",
    "Corpus",
    "normalize_phone",
    "normalize_url",
    "extract_phones",
    "extract_urls",
    "extract_hashtags",
    "load_corpus",
]


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus files."""


# Digit runs with common separators; at least 7 digits after normalization.
_PHONE_RE = re.compile(r"\+?\d(?:[\d\s().\-]*\d)?")
_URL_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*://\S+")
_HASHTAG_RE = re.compile(r"#(\w+)")
_MIN_PHONE_DIGITS = 7


def normalize_phone(raw: str) -> str | None:
    """Canonical phone token: optional leading ``+`` then digits only.

    Tokens with fewer than 7 digits are rejected (returns None).
    """
    digits = "".join(ch for ch in raw if ch.isdigit())
    if len(digits) < _MIN_PHONE_DIGITS:
        return None
    plus = "+" if raw.lstrip().startswith("+") else ""
    return plus + digits


def normalize_url(raw: str) -> str | None:
    """Canonical URL: lowercase scheme and host, strip one trailing slash."""
    raw = raw.strip()
    if "://" not in raw:
        return None
    scheme, rest = raw.split("://", 1)
    if not scheme or not rest:
        return None
    if "/" in rest:
        host, path = rest.split("/", 1)
        path = "/" + path
    else:
        host, path = rest, ""
    if not host:
        return None
    if path == "/":
        path = ""
    elif path.endswith("/") and "?" not in path and "#" not in path:
        path = path[:-1]
    return f"{scheme.lower()}://{host.lower()}{path}"


def extract_phones(text: str) -> list[str]:
    """Normalized, deduplicated phone tokens found in free text."""
    out: list[str] = []
    for match in _PHONE_RE.finditer(text):
        tok = normalize_phone(match.group())
        if tok is not None and tok not in out:
            out.append(tok)
    return out


def extract_urls(text: str) -> list[str]:
    out: list[str] = []
    for match in _URL_RE.finditer(text):
        tok = normalize_url(match.group().rstrip(string.punctuation.replace("/", "")))
        if tok is not None and tok not in out:
            out.append(tok)
    return out


def extract_hashtags(text: str) -> list[str]:
    out: list[str] = []
    for match in _HASHTAG_RE.finditer(text):
        tag = match.group(1).lower()
        if tag not in out:
            out.append(tag)
    return out


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    user_id: str
    text: str
    created_at: str
    phones: tuple[str, ...]
    urls: tuple[str, ...]
    hashtags: tuple[str, ...]


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    followers_count: int = 0
    friends_count: int = 0
    suspended: bool = False
    annotated_label: str | None = None


class FollowerEdge(NamedTuple):
    follower: str
    followee: str


@dataclass(frozen=True)
class Corpus:
    """Loaded corpus with token indices. Immutable after construction."""

    tweets: dict[str, TweetRecord]
    users: dict[str, UserRecord]
    edges: tuple[FollowerEdge, ...]
    phone_index: dict[str, tuple[str, ...]]
    url_index: dict[str, tuple[str, ...]]
    user_index: dict[str, tuple[str, ...]]
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def tweets_of_user(self, user_id: str) -> list[TweetRecord]:
        return [self.tweets[t] for t in self.user_index.get(user_id, ())]

    def tweets_with_phone(self, phone: str) -> list[TweetRecord]:
        return [self.tweets[t] for t in self.phone_index.get(phone, ())]

    def tweets_with_url(self, url: str) -> list[TweetRecord]:
        return [self.tweets[t] for t in self.url_index.get(url, ())]

    def validate(self) -> None:
        """Check index consistency against the tweet table."""
        phone_index, url_index, user_index = _build_indices(self.tweets.values())
        if (
            phone_index != self.phone_index
            or url_index != self.url_index
            or user_index != self.user_index
        ):
            raise CorpusError("corpus indices inconsistent with tweet table")
        for edge in self.edges:
            if edge.follower == edge.followee:
                raise CorpusError(f"self-loop edge for user {edge.follower!r}")
        for tweet in self.tweets.values():
            if tweet.user_id not in self.users:
                raise CorpusError(f"tweet {tweet.tweet_id!r} references unknown user")


def _build_indices(
    tweets: Iterable[TweetRecord],
) -> tuple[dict[str, tuple[str, ...]], dict[str, tuple[str, ...]], dict[str, tuple[str, ...]]]:
    phones: dict[str, list[str]] = {}
    urls: dict[str, list[str]] = {}
    users: dict[str, list[str]] = {}
    for tweet in tweets:
        for p in tweet.phones:
            phones.setdefault(p, []).append(tweet.tweet_id)
        for u in tweet.urls:
            urls.setdefault(u, []).append(tweet.tweet_id)
        users.setdefault(tweet.user_id, []).append(tweet.tweet_id)
    freeze = lambda d: {k: tuple(v) for k, v in d.items()}
    return freeze(phones), freeze(urls), freeze(users)


def _parse_timestamp(value: str, where: str) -> None:
    try:
        datetime.fromisoformat(str(value).replace("Z", "+00:00"))
    except ValueError as exc:
        raise CorpusError(f"{where}: bad created_at {value!r}: {exc}") from None


def _dedupe(items: Iterable[str]) -> tuple[str, ...]:
    seen: list[str] = []
    for item in items:
        if item not in seen:
            seen.append(item)
    return tuple(seen)


def _read_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _load_users(path: Path) -> dict[str, UserRecord]:
    users: dict[str, UserRecord] = {}
    for lineno, obj in _read_jsonl(path):
        where = f"{path}:{lineno}"
        if "user_id" not in obj:
            raise CorpusError(f"{where}: missing user_id")
        user_id = str(obj["user_id"])
        if user_id in users:
            raise CorpusError(f"{where}: duplicate user_id {user_id!r}")
        label = obj.get("annotated_label")
        if label is not None and label not in ("spammer", "benign"):
            raise CorpusError(f"{where}: annotated_label must be spammer|benign")
        users[user_id] = UserRecord(
            user_id=user_id,
            followers_count=int(obj.get("followers_count", 0)),
            friends_count=int(obj.get("friends_count", 0)),
            suspended=bool(obj.get("suspended", False)),
            annotated_label=label,
        )
    return users


def _load_tweets(
    path: Path, users: dict[str, UserRecord], warnings: list[str]
) -> dict[str, TweetRecord]:
    tweets: dict[str, TweetRecord] = {}
    for lineno, obj in _read_jsonl(path):
        where = f"{path}:{lineno}"
        for key in ("id", "user_id", "text", "created_at"):
            if key not in obj:
                raise CorpusError(f"{where}: missing field {key!r}")
        tweet_id = str(obj["id"])
        if tweet_id in tweets:
            raise CorpusError(f"{where}: duplicate tweet id {tweet_id!r}")
        _parse_timestamp(obj["created_at"], where)
        text = str(obj["text"])

        if "phones" in obj:
            phones = _dedupe(
                tok
                for raw in obj["phones"]
                if (tok := normalize_phone(str(raw))) is not None
            )
        else:
            phones = tuple(extract_phones(text))
        if len(phones) > 1:
            raise CorpusError(
                f"{where}: tweet {tweet_id!r} carries {len(phones)} phone numbers; "
                "at most one is allowed"
            )
        if "urls" in obj:
            urls = _dedupe(
                tok
                for raw in obj["urls"]
                if (tok := normalize_url(str(raw))) is not None
            )
        else:
            urls = tuple(extract_urls(text))
        if "hashtags" in obj:
            hashtags = _dedupe(str(h).lstrip("#").lower() for h in obj["hashtags"])
        else:
            hashtags = tuple(extract_hashtags(text))

        user_id = str(obj["user_id"])
        if user_id not in users:
            users[user_id] = UserRecord(user_id=user_id)
            warnings.append(
                f"{where}: tweet {tweet_id!r} by unknown user {user_id!r}; "
                "synthesized a default user record"
            )
        tweets[tweet_id] = TweetRecord(
            tweet_id=tweet_id,
            user_id=user_id,
            text=text,
            created_at=str(obj["created_at"]),
            phones=phones,
            urls=urls,
            hashtags=hashtags,
        )
    return tweets


def _load_edges(
    path: Path, users: dict[str, UserRecord], warnings: list[str]
) -> tuple[FollowerEdge, ...]:
    edges: list[FollowerEdge] = []
    seen: set[FollowerEdge] = set()
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "follower,followee":
            raise CorpusError(f"{path}:1: expected header 'follower,followee'")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise CorpusError(f"{path}:{lineno}: expected 'follower,followee'")
            edge = FollowerEdge(parts[0].strip(), parts[1].strip())
            if edge.follower == edge.followee:
                warnings.append(f"{path}:{lineno}: dropped self-loop {edge.follower!r}")
                continue
            if edge in seen:
                continue
            seen.add(edge)
            for uid in edge:
                if uid not in users:
                    users[uid] = UserRecord(user_id=uid)
                    warnings.append(
                        f"{path}:{lineno}: unknown user {uid!r} in edge list; "
                        "synthesized a default user record"
                    )
            edges.append(edge)
    return tuple(edges)


def load_corpus(
    tweets_path: str | Path,
    users_path: str | Path,
    edges_path: str | Path | None = None,
) -> Corpus:
    """Load and validate a corpus; raises CorpusError naming file and line."""
    tweets_path = Path(tweets_path)
    users_path = Path(users_path)
    for p in (tweets_path, users_path):
        if not p.is_file():
            raise CorpusError(f"missing input file: {p}")
    warnings: list[str] = []
    users = _load_users(users_path)
    tweets = _load_tweets(tweets_path, users, warnings)
    edges: tuple[FollowerEdge, ...] = ()
    if edges_path is not None:
        edges_path = Path(edges_path)
        if not edges_path.is_file():
            raise CorpusError(f"missing input file: {edges_path}")
        edges = _load_edges(edges_path, users, warnings)
    phone_index, url_index, user_index = _build_indices(tweets.values())
    corpus = Corpus(
        tweets=tweets,
        users=users,
        edges=edges,
        phone_index=phone_index,
        url_index=url_index,
        user_index=user_index,
        warnings=tuple(warnings),
    )
    corpus.validate()
    return corpus
