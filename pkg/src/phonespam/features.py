"""Per-user feature assembly: HMPS plus network/content baseline features.

The OSN2 block has seven entries: authority and hub scores from the follower
graph, then five tweet ratios (fraction of tweets with URLs, avg URLs per
tweet, avg URLs per word, avg hashtags per word, avg hashtags per tweet).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .campaigns import tokenize
from .corpus import Corpus, FollowerEdge
from .hin import CampaignTree
from .hmps import score_all

__all__ = [
    "OSN2_FEATURE_NAMES",
    "FeatureVector",
    "hits_scores",
    "osn2_features",
    "assemble",
    "feature_names",
]

OSN2_FEATURE_NAMES: tuple[str, ...] = (
    "authority",
    "hub",
    "frac_tweets_with_urls",
    "avg_urls_per_tweet",
    "avg_urls_per_word",
    "avg_hashtags_per_word",
    "avg_hashtags_per_tweet",
)


@dataclass(frozen=True)
class FeatureVector:
    user_id: str
    campaign_id: int
    hmps: float
    osn2: tuple[float, ...] = ()

    def values(self) -> np.ndarray:
        return np.array((self.hmps,) + self.osn2, dtype=float)


def feature_names(mode: str) -> tuple[str, ...]:
    if mode == "hmps":
        return ("hmps",)
    if mode == "hmps+osn2":
        return ("hmps",) + OSN2_FEATURE_NAMES
    raise ValueError(f"unknown feature mode {mode!r}")


def hits_scores(
    edges: Sequence[FollowerEdge], max_iter: int = 200, tol: float = 1e-12
) -> dict[str, tuple[float, float]]:
    """HITS authority/hub scores on the follower -> followee digraph.

    Power iteration with L2 normalization after every half-step; both score
    vectors have unit L2 norm on a nonempty graph. Users not incident to any
    edge are absent from the result (callers default them to zeros).
    """
    if not edges:
        return {}
    nodes = sorted({u for e in edges for u in e})
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    adj = np.zeros((n, n), dtype=float)
    for follower, followee in edges:
        adj[index[follower], index[followee]] = 1.0

    def _unit(vec: np.ndarray) -> np.ndarray:
        norm = float(np.linalg.norm(vec))
        return vec / norm if norm > 0.0 else vec

    hub = np.full(n, 1.0 / np.sqrt(n))
    auth = np.zeros(n)
    for _ in range(max_iter):
        new_auth = _unit(adj.T @ hub)
        new_hub = _unit(adj @ new_auth)
        delta = float(np.max(np.abs(new_hub - hub)) + np.max(np.abs(new_auth - auth)))
        hub, auth = new_hub, new_auth
        if delta < tol:
            break
    return {u: (float(auth[index[u]]), float(hub[index[u]])) for u in nodes}


def osn2_features(
    corpus: Corpus,
    user_id: str,
    hits: Mapping[str, tuple[float, float]] | None = None,
) -> tuple[float, ...]:
    """The seven-entry OSN2 block for one user; all zeros without tweets."""
    tweets = corpus.tweets_of_user(user_id)
    if not tweets:
        return (0.0,) * len(OSN2_FEATURE_NAMES)
    authority, hub = (hits or {}).get(user_id, (0.0, 0.0))
    n = len(tweets)
    total_urls = sum(len(t.urls) for t in tweets)
    total_hashtags = sum(len(t.hashtags) for t in tweets)
    total_words = sum(len(tokenize(t.text)) for t in tweets)
    with_urls = sum(1 for t in tweets if t.urls)
    per_word = lambda count: count / total_words if total_words else 0.0
    return (
        authority,
        hub,
        with_urls / n,
        total_urls / n,
        per_word(total_urls),
        per_word(total_hashtags),
        total_hashtags / n,
    )


def assemble(
    corpus: Corpus,
    tree: CampaignTree,
    mode: str = "hmps+osn2",
    hits: Mapping[str, tuple[float, float]] | None = None,
    scores: Mapping[str, float] | None = None,
) -> list[FeatureVector]:
    """Feature vectors for every user of one campaign tree, sorted by user id.

    ``scores`` may carry precomputed HMPS values; otherwise they are computed
    here. In "hmps" mode vectors have length 1, in "hmps+osn2" length 8.
    """
    if mode not in ("hmps", "hmps+osn2"):
        raise ValueError(f"unknown feature mode {mode!r}")
    if scores is None:
        scores = score_all(tree)
    vectors = []
    for user in tree.users:
        osn2 = osn2_features(corpus, user, hits) if mode == "hmps+osn2" else ()
        vectors.append(
            FeatureVector(
                user_id=user,
                campaign_id=tree.campaign_id,
                hmps=scores[user],
                osn2=osn2,
            )
        )
    return vectors
