"""HITS scores, the seven-entry OSN2 block, and feature assembly."""

from __future__ import annotations

import numpy as np
import pytest

from phonespam.corpus import FollowerEdge
from phonespam.features import (
    OSN2_FEATURE_NAMES,
    FeatureVector,
    assemble,
    feature_names,
    hits_scores,
    osn2_features,
)
from phonespam.hin import CampaignTree

P = "+15550100000"


class TestFeatureNames:
    def test_modes(self):
        assert feature_names("hmps") == ("hmps",)
        assert feature_names("hmps+osn2") == ("hmps",) + OSN2_FEATURE_NAMES
        assert len(feature_names("hmps+osn2")) == 8

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="unknown feature mode"):
            feature_names("osn1")


def hits_oracle(edges: list[FollowerEdge]) -> dict[str, tuple[float, float]]:
    """Authority/hub as principal eigenvectors of A'A and AA' via eigh."""
    nodes = sorted({u for e in edges for u in e})
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    adj = np.zeros((n, n))
    for f, g in edges:
        adj[index[f], index[g]] = 1.0

    def principal(mat: np.ndarray) -> np.ndarray:
        vals, vecs = np.linalg.eigh(mat)
        vec = np.abs(vecs[:, -1])
        return vec / np.linalg.norm(vec)

    auth = principal(adj.T @ adj)
    hub = principal(adj @ adj.T)
    return {u: (float(auth[index[u]]), float(hub[index[u]])) for u in nodes}


class TestHits:
    def test_single_edge_exact(self):
        got = hits_scores([FollowerEdge("a", "b")])
        assert got == {"a": (0.0, 1.0), "b": (1.0, 0.0)}

    def test_empty_graph(self):
        assert hits_scores([]) == {}

    def test_matches_eigenvector_oracle(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            nodes = [f"n{i}" for i in range(10)]
            edges = [
                FollowerEdge(a, b)
                for a in nodes
                for b in nodes
                if a != b and rng.random() < 0.4
            ]
            got = hits_scores(edges)
            want = hits_oracle(edges)
            assert set(got) == set(want)
            for u in want:
                assert got[u][0] == pytest.approx(want[u][0], abs=1e-8)
                assert got[u][1] == pytest.approx(want[u][1], abs=1e-8)

    def test_unit_norms(self):
        rng = np.random.default_rng(3)
        nodes = [f"n{i}" for i in range(8)]
        edges = [
            FollowerEdge(a, b)
            for a in nodes
            for b in nodes
            if a != b and rng.random() < 0.5
        ]
        got = hits_scores(edges)
        auth = np.array([v[0] for v in got.values()])
        hub = np.array([v[1] for v in got.values()])
        assert np.linalg.norm(auth) == pytest.approx(1.0, abs=1e-9)
        assert np.linalg.norm(hub) == pytest.approx(1.0, abs=1e-9)

    def test_isolated_users_absent(self):
        got = hits_scores([FollowerEdge("a", "b")])
        assert "c" not in got


class TestOsn2:
    @pytest.fixture()
    def corpus(self, corpus_builder):
        tweets = [
            {
                "user_id": "u",
                "text": "w1 w2 w3 w4",
                "urls": ["http://a.example/x"],
                "hashtags": ["#h1", "#h2"],
            },
            {"user_id": "u", "text": "w1 w2 w3 w4 w5 w6", "hashtags": ["#h3"]},
            {"user_id": "quiet", "text": "hello"},
        ]
        users = [{"user_id": "u"}, {"user_id": "quiet"}, {"user_id": "silent"}]
        return corpus_builder(tweets, users=users)

    def test_golden_ratios(self, corpus):
        got = osn2_features(corpus, "u")
        assert got == (0.0, 0.0, 1 / 2, 1 / 2, 1 / 10, 3 / 10, 3 / 2)

    def test_hits_entries_passed_through(self, corpus):
        got = osn2_features(corpus, "u", hits={"u": (0.3, 0.7)})
        assert got[:2] == (0.3, 0.7)
        assert got[2:] == (1 / 2, 1 / 2, 1 / 10, 3 / 10, 3 / 2)

    def test_user_without_tweets_is_all_zeros(self, corpus):
        assert osn2_features(corpus, "silent") == (0.0,) * 7

    def test_wordless_tweets_zero_per_word_ratios(self, corpus_builder):
        c = corpus_builder(
            [{"user_id": "u", "text": "...", "urls": ["http://a.example/x"]}]
        )
        got = osn2_features(c, "u")
        assert got == (0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0)


class TestAssemble:
    @pytest.fixture()
    def setup(self, corpus_builder):
        tweets = [
            {"user_id": "a", "text": "w1 w2", "phones": [P]},
            {"user_id": "b", "text": "w1 w2 w3", "phones": [P]},
        ]
        corpus = corpus_builder(tweets)
        tree = CampaignTree(
            campaign_id=5,
            users=("a", "b"),
            phones=(P,),
            urls=(),
            user_weights={"a": {P: 0.5}, "b": {P: 0.5}},
            token_weights={P: 1.0},
            spammers=frozenset({"b"}),
        )
        return corpus, tree

    def test_vector_shape_and_order(self, setup):
        corpus, tree = setup
        vectors = assemble(corpus, tree, mode="hmps+osn2")
        assert [v.user_id for v in vectors] == ["a", "b"]
        assert all(v.campaign_id == 5 for v in vectors)
        assert all(len(v.values()) == 8 for v in vectors)
        assert vectors[0].hmps == 0.25  # pair with b through the shared phone
        assert vectors[1].hmps == 0.0  # lone spammer excludes itself

    def test_hmps_only_mode(self, setup):
        corpus, tree = setup
        vectors = assemble(corpus, tree, mode="hmps")
        assert all(v.osn2 == () for v in vectors)
        assert all(v.values().shape == (1,) for v in vectors)

    def test_precomputed_scores_honored(self, setup):
        corpus, tree = setup
        vectors = assemble(
            corpus, tree, mode="hmps", scores={"a": 11.0, "b": 22.0}
        )
        assert [v.hmps for v in vectors] == [11.0, 22.0]

    def test_unknown_mode_rejected(self, setup):
        corpus, tree = setup
        with pytest.raises(ValueError, match="unknown feature mode"):
            assemble(corpus, tree, mode="bogus")

    def test_values_dtype(self, setup):
        corpus, tree = setup
        (vec, _) = assemble(corpus, tree, mode="hmps+osn2")
        arr = vec.values()
        assert arr.dtype == np.float64
        assert arr[0] == vec.hmps
        assert tuple(arr[1:]) == vec.osn2


class TestFeatureVector:
    def test_values_concatenation(self):
        v = FeatureVector(user_id="u", campaign_id=0, hmps=2.0, osn2=(1.0, 0.5))
        assert v.values().tolist() == [2.0, 1.0, 0.5]
