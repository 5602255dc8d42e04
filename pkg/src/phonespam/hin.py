"""Per-campaign hierarchical trees over users, tokens, and the campaign root.

Each campaign becomes a three-level tree: the campaign root on top, its phone
and URL token nodes below, and users as leaves. Edge weights:

    W(user, token) = tweets by the user containing the token
                     / all campaign tweets containing the token
    W(camp, token) = campaign tweets containing the token
                     / total tweet-token incidence across the campaign

Counts are restricted to the campaign's retained tweet set and count each
tweet once per token, so for every token the user weights sum to exactly 1
and the token-root weights sum to exactly 1 across the tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .campaigns import Campaign
from .corpus import Corpus

__all__ = ["NodeKind", "CampaignTree", "weight_user_token", "weight_campaign_token", "build_tree"]


class NodeKind(Enum):
    USER = "user"
    PHONE = "phone"
    URL = "url"
    CAMPAIGN = "campaign"


@dataclass(frozen=True)
class CampaignTree:
    """Immutable weighted tree for one campaign.

    ``user_weights[u][t]`` is W(user u, token t) over the tokens u tweeted;
    ``token_weights[t]`` is W(campaign, token t). Token strings are unique
    within a tree (phone and URL formats cannot collide).
    """

    campaign_id: int
    users: tuple[str, ...]
    phones: tuple[str, ...]
    urls: tuple[str, ...]
    user_weights: dict[str, dict[str, float]]
    token_weights: dict[str, float]
    spammers: frozenset[str]

    @property
    def tokens(self) -> tuple[str, ...]:
        return self.phones + self.urls

    def node_kind(self, node: str) -> NodeKind:
        if node in self.user_weights:
            return NodeKind.USER
        if node in self.phones:
            return NodeKind.PHONE
        if node in self.urls:
            return NodeKind.URL
        raise KeyError(f"unknown node {node!r} in campaign {self.campaign_id}")

    def root_id(self) -> str:
        return f"camp:{self.campaign_id}"


def _token_tweets(corpus: Corpus, campaign: Campaign, token: str) -> set[str]:
    index = corpus.phone_index if token in corpus.phone_index else corpus.url_index
    return set(index.get(token, ())) & set(campaign.tweet_ids)


def weight_user_token(
    corpus: Corpus, campaign: Campaign, user_id: str, token: str
) -> float:
    """W(user, token) within the campaign's retained tweet set."""
    incident = _token_tweets(corpus, campaign, token)
    if not incident:
        raise ValueError(
            f"token {token!r} occurs in no tweet of campaign {campaign.campaign_id}"
        )
    by_user = sum(1 for t in incident if corpus.tweets[t].user_id == user_id)
    if by_user == 0:
        raise ValueError(
            f"user {user_id!r} never tweeted token {token!r} "
            f"in campaign {campaign.campaign_id}"
        )
    return by_user / len(incident)


def weight_campaign_token(corpus: Corpus, campaign: Campaign, token: str) -> float:
    """W(campaign, token): the token's share of the campaign's incidence mass."""
    tokens = list(campaign.phones) + list(campaign.urls)
    counts = {t: len(_token_tweets(corpus, campaign, t)) for t in tokens}
    if token not in counts or counts[token] == 0:
        raise ValueError(
            f"token {token!r} occurs in no tweet of campaign {campaign.campaign_id}"
        )
    return counts[token] / sum(counts.values())


def build_tree(corpus: Corpus, campaign: Campaign) -> CampaignTree:
    """Build the campaign's tree; tokens without retained tweets are dropped."""
    if not campaign.tweet_ids:
        raise ValueError(f"campaign {campaign.campaign_id} has no tweets")
    tweet_ids = list(campaign.tweet_ids)
    tweet_set = set(tweet_ids)

    incidence: dict[str, list[str]] = {}
    for kind_tokens, index in (
        (campaign.phones, corpus.phone_index),
        (campaign.urls, corpus.url_index),
    ):
        for token in kind_tokens:
            hits = [t for t in index.get(token, ()) if t in tweet_set]
            if hits:
                incidence[token] = hits

    phones = tuple(sorted(t for t in campaign.phones if t in incidence))
    urls = tuple(sorted(t for t in campaign.urls if t in incidence))

    user_counts: dict[str, dict[str, int]] = {}
    for token in phones + urls:
        for tid in incidence[token]:
            uid = corpus.tweets[tid].user_id
            user_counts.setdefault(uid, {}).setdefault(token, 0)
            user_counts[uid][token] += 1

    user_weights = {
        uid: {
            token: count / len(incidence[token])
            for token, count in sorted(counts.items())
        }
        for uid, counts in sorted(user_counts.items())
    }
    total_incidence = sum(len(incidence[t]) for t in phones + urls)
    token_weights = {t: len(incidence[t]) / total_incidence for t in phones + urls}

    users = tuple(sorted(user_weights))
    return CampaignTree(
        campaign_id=campaign.campaign_id,
        users=users,
        phones=phones,
        urls=urls,
        user_weights=user_weights,
        token_weights=token_weights,
        spammers=frozenset(u for u in users if u in campaign.spammers),
    )
