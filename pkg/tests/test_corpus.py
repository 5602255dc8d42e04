"""Loader, normalization, and extraction behavior."""

from __future__ import annotations

import json

import pytest

from phonespam.corpus import (
    CorpusError,
    extract_hashtags,
    extract_phones,
    extract_urls,
    load_corpus,
    normalize_phone,
    normalize_url,
)
from tests.conftest import write_corpus


class TestNormalizePhone:
    def test_keeps_plus_and_digits(self):
        assert normalize_phone("+1 (555) 010-0000") == "+15550100000"

    def test_separators_stripped(self):
        assert normalize_phone("555.010.0000") == "5550100000"

    def test_rejects_below_seven_digits(self):
        assert normalize_phone("123456") is None
        assert normalize_phone("1234567") == "1234567"

    def test_plus_requires_leading_position(self):
        assert normalize_phone("555+0100000") == "5550100000"


class TestNormalizeUrl:
    def test_lowercases_scheme_and_host(self):
        assert normalize_url("HTTP://Example.COM/Offer") == "http://example.com/Offer"

    def test_strips_single_trailing_slash(self):
        assert normalize_url("http://a.example/x/") == "http://a.example/x"
        assert normalize_url("http://a.example/") == "http://a.example"

    def test_requires_scheme(self):
        assert normalize_url("example.com/x") is None


class TestExtraction:
    def test_phone_from_text(self):
        assert extract_phones("call +15550100000 now") == ["+15550100000"]

    def test_short_digit_runs_ignored(self):
        assert extract_phones("s00w01 s00w02 #deal00") == []

    def test_digit_runs_do_not_chain_across_words(self):
        # separators may join digit groups, but letters break the run
        assert extract_phones("w01 02w 03x 04y 05z") == []

    def test_url_from_text(self):
        text = "see http://camp00.example/offer for more"
        assert extract_urls(text) == ["http://camp00.example/offer"]

    def test_hashtags_lowercased_and_deduped(self):
        assert extract_hashtags("#Deal00 #deal00 #win00") == ["deal00", "win00"]


class TestLoadCorpus:
    def test_valid_corpus_builds_indices(self, tmp_path):
        tweets = [
            {"user_id": "alice", "text": "hi +15550100000 http://a.example/x #tag"},
            {"user_id": "bob", "text": "plain words only"},
        ]
        t, u, e = write_corpus(tmp_path, tweets, edges=[("alice", "bob")])
        corpus = load_corpus(t, u, e)
        assert corpus.phone_index["+15550100000"] == ("t0",)
        assert corpus.url_index["http://a.example/x"] == ("t0",)
        assert corpus.tweets["t0"].hashtags == ("tag",)
        assert [tw.tweet_id for tw in corpus.tweets_of_user("bob")] == ["t1"]
        assert len(corpus.edges) == 1
        assert corpus.warnings == ()

    def test_explicit_token_fields_override_text(self, tmp_path):
        tweets = [
            {
                "user_id": "alice",
                "text": "ignored +19990000000",
                "phones": ["+15550100000"],
                "urls": ["http://b.example/y"],
                "hashtags": ["#Promo"],
            }
        ]
        t, u, _ = write_corpus(tmp_path, tweets)
        corpus = load_corpus(t, u)
        tw = corpus.tweets["t0"]
        assert tw.phones == ("+15550100000",)
        assert tw.urls == ("http://b.example/y",)
        assert tw.hashtags == ("promo",)

    def test_missing_required_field_raises(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        path.write_text(json.dumps({"id": "t0", "user_id": "a", "text": "x"}) + "\n")
        users = tmp_path / "users.jsonl"
        users.write_text(json.dumps({"user_id": "a"}) + "\n")
        with pytest.raises(CorpusError, match="created_at"):
            load_corpus(path, users)

    def test_duplicate_tweet_id_raises(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        row = {"id": "t0", "user_id": "a", "text": "x", "created_at": "2023-01-01T00:00:00Z"}
        path.write_text(json.dumps(row) + "\n" + json.dumps(row) + "\n")
        users = tmp_path / "users.jsonl"
        users.write_text(json.dumps({"user_id": "a"}) + "\n")
        with pytest.raises(CorpusError, match="duplicate tweet id"):
            load_corpus(path, users)

    def test_two_phones_in_one_tweet_raises(self, tmp_path):
        tweets = [{"user_id": "a", "text": "+15550100000 and +15550200000"}]
        t, u, _ = write_corpus(tmp_path, tweets)
        with pytest.raises(CorpusError, match="phone numbers"):
            load_corpus(t, u)

    def test_unknown_tweet_author_synthesized_with_warning(self, tmp_path):
        tweets = [{"user_id": "ghost", "text": "hello"}]
        t, _, _ = write_corpus(tmp_path, tweets)
        users = tmp_path / "users.jsonl"
        users.write_text(json.dumps({"user_id": "someone_else"}) + "\n")
        corpus = load_corpus(t, users)
        assert "ghost" in corpus.users
        assert corpus.users["ghost"].followers_count == 0
        assert len(corpus.warnings) == 1
        assert "ghost" in corpus.warnings[0]

    def test_missing_file_raises(self, tmp_path):
        users = tmp_path / "users.jsonl"
        users.write_text(json.dumps({"user_id": "a"}) + "\n")
        with pytest.raises(CorpusError, match="missing input file"):
            load_corpus(tmp_path / "nope.jsonl", users)

    def test_benchmark_loads_clean(self, bench_corpus):
        assert bench_corpus.warnings == ()
        assert len(bench_corpus.users) == 1000
        assert all(len(t.phones) <= 1 for t in bench_corpus.tweets.values())
