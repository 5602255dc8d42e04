"""Shared fixtures: the fixed-seed benchmark corpus and a tiny corpus builder."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from phonespam.corpus import Corpus, load_corpus
from phonespam.pipeline import Prepared, RunConfig, prepare
from phonespam.synth import SynthConfig, generate


@pytest.fixture(scope="session")
def bench_dir(tmp_path_factory) -> Path:
    """Default synthetic benchmark (seed 7), generated once per session."""
    out = tmp_path_factory.mktemp("bench")
    generate(SynthConfig(), out)
    return out


@pytest.fixture(scope="session")
def bench_truth(bench_dir: Path) -> dict:
    return json.loads((bench_dir / "truth.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def bench_corpus(bench_dir: Path) -> Corpus:
    return load_corpus(
        bench_dir / "tweets.jsonl", bench_dir / "users.jsonl", bench_dir / "edges.csv"
    )


@pytest.fixture(scope="session")
def bench_prepared(bench_corpus: Corpus) -> Prepared:
    return prepare(bench_corpus, RunConfig())


def write_corpus(
    tmp: Path,
    tweets: list[dict],
    users: list[dict] | None = None,
    edges: list[tuple[str, str]] | None = None,
) -> tuple[Path, Path, Path | None]:
    """Write ad-hoc corpus files; users default to bare records for tweet authors."""
    tweets_path = tmp / "tweets.jsonl"
    with tweets_path.open("w", encoding="utf-8") as fh:
        for i, tw in enumerate(tweets):
            row = {"id": f"t{i}", "created_at": "2023-01-01T00:00:00Z"}
            row.update(tw)
            fh.write(json.dumps(row) + "\n")
    if users is None:
        seen = sorted({tw["user_id"] for tw in tweets})
        users = [{"user_id": u} for u in seen]
    users_path = tmp / "users.jsonl"
    with users_path.open("w", encoding="utf-8") as fh:
        for u in users:
            row = {"followers_count": 0, "friends_count": 0, "suspended": False}
            row.update(u)
            fh.write(json.dumps(row) + "\n")
    edges_path = None
    if edges is not None:
        edges_path = tmp / "edges.csv"
        with edges_path.open("w", encoding="utf-8") as fh:
            fh.write("follower,followee\n")
            for a, b in edges:
                fh.write(f"{a},{b}\n")
    return tweets_path, users_path, edges_path


@pytest.fixture()
def corpus_builder(tmp_path: Path):
    """Factory loading a small handwritten corpus from dict rows."""

    def build(
        tweets: list[dict],
        users: list[dict] | None = None,
        edges: list[tuple[str, str]] | None = None,
    ) -> Corpus:
        tweets_path, users_path, edges_path = write_corpus(tmp_path, tweets, users, edges)
        return load_corpus(tweets_path, users_path, edges_path)

    return build
