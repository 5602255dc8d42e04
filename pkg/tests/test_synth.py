"""Synthetic corpus generator: determinism, planted structure, and validation."""

from __future__ import annotations

import dataclasses
import filecmp
import json

import pytest

from phonespam.campaigns import tokenize
from phonespam.corpus import load_corpus
from phonespam.features import osn2_features
from phonespam.synth import SynthConfig, generate

SMALL = dict(n_campaigns=4, users_per_campaign=16, hidden_per_campaign=4, seed=11)


class TestConfig:
    def test_derived_counts_at_defaults(self):
        config = SynthConfig()
        assert config.spam_per_campaign == 20
        assert config.benign_per_campaign == 30
        assert config.n_deferred == 10

    def test_all_flag_fields_are_scalars(self):
        for field in dataclasses.fields(SynthConfig):
            assert field.type in ("int", "float"), field.name

    def test_validation_errors(self):
        with pytest.raises(ValueError, match="n_campaigns"):
            SynthConfig(n_campaigns=0)
        with pytest.raises(ValueError, match="overlap_fraction must be"):
            SynthConfig(overlap_fraction=1.5)
        with pytest.raises(ValueError, match="words_per_tweet"):
            SynthConfig(words_per_tweet=31)
        with pytest.raises(ValueError, match=">= 2 suspended"):
            SynthConfig(suspended_low_users=1, suspended_high_users=0)
        with pytest.raises(ValueError, match="too few benign"):
            SynthConfig(users_per_campaign=21)
        with pytest.raises(ValueError, match="tweets_per_user"):
            SynthConfig(tweets_per_user=1)

    def test_every_deferred_campaign_needs_a_bridge_host(self):
        with pytest.raises(ValueError, match="at least one trainable"):
            SynthConfig(deferred_fraction=1.0)
        with pytest.raises(ValueError, match="not enough hidden spammers"):
            SynthConfig(
                n_campaigns=4,
                users_per_campaign=16,
                deferred_fraction=0.75,
                hidden_per_campaign=2,
            )

    def test_overlap_limited_by_benign_population(self):
        with pytest.raises(ValueError, match="too large for the benign"):
            SynthConfig(
                n_campaigns=2,
                users_per_campaign=23,
                deferred_fraction=0.0,
                overlap_fraction=1.0,
            )


class TestDeterminism:
    def test_regeneration_is_byte_identical(self, tmp_path):
        config = SynthConfig(**SMALL)
        first = generate(config, tmp_path / "a")
        second = generate(config, tmp_path / "b")
        assert sorted(first) == ["edges", "truth", "tweets", "users"]
        for key in first:
            assert filecmp.cmp(first[key], second[key], shallow=False), key

    def test_seed_changes_output(self, tmp_path):
        a = generate(SynthConfig(**SMALL), tmp_path / "a")
        b = generate(
            SynthConfig(**{**SMALL, "seed": 12}), tmp_path / "b"
        )
        assert not filecmp.cmp(a["tweets"], b["tweets"], shallow=False)


class TestDefaultBenchmark:
    def test_population_counts(self, bench_corpus, bench_truth):
        assert len(bench_corpus.users) == 1000
        assert len(bench_corpus.tweets) == 8140
        assert len(bench_corpus.edges) == 8800
        assert bench_corpus.warnings == ()
        assert len(bench_truth["spammers"]) == 400
        assert len(bench_truth["suspended"]) == 90
        assert len(bench_truth["hidden"]) == 310
        assert bench_truth["trainable_campaigns"] == list(range(10))
        assert bench_truth["deferred_campaigns"] == list(range(10, 20))

    def test_overlap_realized_exactly(self, bench_truth):
        memberships = bench_truth["memberships"]
        assert len(memberships) == 1000
        dual = [u for u, cs in memberships.items() if len(cs) > 1]
        assert len(dual) == 210
        assert abs(len(dual) / 1000 - 0.21) <= 0.03
        assert sorted(dual) == sorted(bench_truth["overlap_users"])
        assert all(len(cs) in (1, 2) for cs in memberships.values())

    def test_bridges_link_trainable_to_deferred(self, bench_truth):
        bridges = bench_truth["bridge_spammers"]
        assert len(bridges) == 10
        hidden = set(bench_truth["hidden"])
        deferred = set(bench_truth["deferred_campaigns"])
        covered = set()
        for uid in bridges:
            assert uid in hidden
            home, away = bench_truth["memberships"][uid]
            assert home in bench_truth["trainable_campaigns"]
            assert away in deferred
            covered.add(away)
        assert covered == deferred

    def test_phone_partition(self, bench_truth):
        phones = bench_truth["campaign_of_phone"]
        assert len(phones) == 60
        per_campaign: dict[int, int] = {}
        for campaign in phones.values():
            per_campaign[campaign] = per_campaign.get(campaign, 0) + 1
        assert set(per_campaign.values()) == {3}

    def test_spam_timeline_structure(self, bench_corpus, bench_truth):
        # low-band suspended: 4 promotion + 4 filler tweets
        low = bench_corpus.tweets_of_user("c00s00")
        assert len(low) == 8
        on = [t for t in low if t.phones]
        off = [t for t in low if not t.phones]
        assert (len(on), len(off)) == (4, 4)
        for t in on:
            assert t.phones == ("+15550000000",)
            assert t.urls == ("http://camp00.example/offer",)
            assert t.hashtags == ("deal00", "win00")
            assert len(tokenize(t.text)) == 34
        for t in off:
            assert len(t.urls) == 1
            assert len(t.hashtags) == 2
            assert len(tokenize(t.text)) == 34

        # high-band suspended: all ten tweets promote
        high = bench_corpus.tweets_of_user("c00s04")
        assert len(high) == 10
        assert all(t.phones for t in high)

        # hidden spammers sit between the bands
        hidden = bench_corpus.tweets_of_user("c00h01")
        assert len(hidden) == 8
        assert sum(1 for t in hidden if t.phones) == 6

    def test_bridge_promotes_both_campaigns(self, bench_corpus, bench_truth):
        uid = sorted(bench_truth["bridge_spammers"])[0]
        home, away = bench_truth["memberships"][uid]
        assert bench_truth["bridge_spammers"][uid] == [away]
        tweets = bench_corpus.tweets_of_user(uid)
        assert len(tweets) == 14
        campaigns = [
            bench_truth["campaign_of_phone"][t.phones[0]] for t in tweets if t.phones
        ]
        assert campaigns.count(home) == 6
        assert campaigns.count(away) == 8

    def test_benign_volume_per_campaign(self, bench_corpus, bench_truth):
        spammers = set(bench_truth["spammers"])
        volume: dict[int, int] = {c: 0 for c in range(20)}
        for tweet in bench_corpus.tweets.values():
            if tweet.user_id in spammers or not tweet.phones:
                continue
            volume[bench_truth["campaign_of_phone"][tweet.phones[0]]] += 1
        assert set(volume.values()) == {240}

    def test_spammer_content_ratios_indistinguishable(self, bench_corpus, bench_truth):
        blocks = {
            osn2_features(bench_corpus, uid)[2:] for uid in bench_truth["spammers"]
        }
        assert len(blocks) == 1

    def test_user_records_consistent_with_truth(self, bench_corpus, bench_truth):
        suspended = set(bench_truth["suspended"])
        spammers = set(bench_truth["spammers"])
        for uid, record in bench_corpus.users.items():
            assert record.suspended == (uid in suspended)
            assert (record.annotated_label == "spammer") == (uid in spammers)

    def test_follow_degrees_recorded(self, bench_corpus):
        out_deg: dict[str, int] = {}
        in_deg: dict[str, int] = {}
        for follower, followee in bench_corpus.edges:
            out_deg[follower] = out_deg.get(follower, 0) + 1
            in_deg[followee] = in_deg.get(followee, 0) + 1
        for uid, record in bench_corpus.users.items():
            assert record.friends_count == out_deg.get(uid, 0)
            assert record.followers_count == in_deg.get(uid, 0)

    def test_spam_cliques_stay_within_home_campaign(self, bench_corpus, bench_truth):
        spammers = set(bench_truth["spammers"])
        home = {u: cs[0] for u, cs in bench_truth["memberships"].items()}
        spam_edges = [
            e for e in bench_corpus.edges if e.follower in spammers
        ]
        assert len(spam_edges) == 20 * 20 * 19
        for follower, followee in spam_edges:
            assert followee in spammers
            assert home[follower] == home[followee]


class TestOverlapToggles:
    def test_zero_overlap_means_single_membership(self, tmp_path):
        config = SynthConfig(**{**SMALL, "overlap_fraction": 0.0})
        paths = generate(config, tmp_path)
        truth = json.loads(paths["truth"].read_text())
        assert all(len(cs) == 1 for cs in truth["memberships"].values())
        assert truth["bridge_spammers"] == {}
        assert truth["overlap_users"] == []

    def test_zero_deferred_makes_all_campaigns_trainable(self, tmp_path):
        config = SynthConfig(**{**SMALL, "deferred_fraction": 0.0})
        paths = generate(config, tmp_path)
        truth = json.loads(paths["truth"].read_text())
        assert truth["deferred_campaigns"] == []
        assert truth["trainable_campaigns"] == [0, 1, 2, 3]

    def test_generated_files_load_clean(self, tmp_path):
        config = SynthConfig(**SMALL)
        paths = generate(config, tmp_path)
        corpus = load_corpus(paths["tweets"], paths["users"], paths["edges"])
        assert corpus.warnings == ()
        assert len(corpus.users) == 64
