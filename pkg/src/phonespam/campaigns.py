"""Campaign identification from phone-anchored tweet documents.

Each phone number aggregates its tweets into one document. A document's
signature is its top-k unigrams by raw frequency; tweets sharing fewer than
``min_common`` signature unigrams are dropped as off-topic. Documents whose
signatures overlap with Jaccard similarity strictly above the threshold are
merged (single link) into campaigns.
"""

from __future__ import annotations

import logging
import string
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

from .corpus import Corpus

__all__ = [
    "ClusteringParams",
    "PhoneDocument",
    "Campaign",
    "tokenize",
    "jaccard",
    "build_phone_documents",
    "merge_into_campaigns",
    "filter_campaigns_with_spammers",
    "silhouette_check",
]

logger = logging.getLogger(__name__)

_STRIP_CHARS = string.punctuation + string.whitespace


def tokenize(text: str) -> list[str]:
    """Lowercased whitespace-split unigrams with edge punctuation stripped."""
    out = []
    for tok in text.lower().split():
        tok = tok.strip(_STRIP_CHARS)
        if tok:
            out.append(tok)
    return out


def jaccard(a: set[str] | frozenset[str], b: set[str] | frozenset[str]) -> float:
    """Jaccard similarity; two empty sets are defined as identical (1.0)."""
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class ClusteringParams:
    top_k: int = 30
    min_common: int = 5
    jaccard_threshold: float = 0.7

    def __post_init__(self) -> None:
        if self.min_common < 1:
            raise ValueError("min_common must be >= 1")
        if self.top_k < self.min_common:
            raise ValueError("top_k must be >= min_common")
        if not (0.0 < self.jaccard_threshold <= 1.0):
            raise ValueError("jaccard_threshold must be in (0, 1]")


@dataclass(frozen=True)
class PhoneDocument:
    """A phone number with its signature and the tweets deemed relevant."""

    phone: str
    signature: frozenset[str]
    tweet_ids: tuple[str, ...]


@dataclass(frozen=True)
class Campaign:
    campaign_id: int
    phones: tuple[str, ...]
    tweet_ids: tuple[str, ...]
    users: tuple[str, ...]
    urls: tuple[str, ...]
    spammers: frozenset[str]


def build_phone_documents(
    corpus: Corpus,
    params: ClusteringParams | None = None,
    tokenizer: Callable[[str], list[str]] = tokenize,
) -> list[PhoneDocument]:
    """One document per phone: top-k signature, then relevance-filtered tweets.

    Frequency is the raw token count across the phone's tweets; rank ties are
    broken lexicographically. A tweet is kept only if it shares at least
    ``min_common`` distinct unigrams with the signature.
    """
    params = params or ClusteringParams()
    docs: list[PhoneDocument] = []
    for phone in sorted(corpus.phone_index):
        tweet_ids = corpus.phone_index[phone]
        counts: Counter[str] = Counter()
        tweet_tokens: dict[str, set[str]] = {}
        for tid in tweet_ids:
            toks = tokenizer(corpus.tweets[tid].text)
            counts.update(toks)
            tweet_tokens[tid] = set(toks)
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        signature = frozenset(tok for tok, _ in ranked[: params.top_k])
        kept = tuple(
            tid
            for tid in tweet_ids
            if len(tweet_tokens[tid] & signature) >= params.min_common
        )
        if not kept:
            logger.info(
                "phone %s: no tweet shares %d unigrams with its signature; "
                "document is empty",
                phone,
                params.min_common,
            )
        docs.append(PhoneDocument(phone=phone, signature=signature, tweet_ids=kept))
    return docs


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def merge_into_campaigns(
    docs: Sequence[PhoneDocument],
    corpus: Corpus,
    params: ClusteringParams | None = None,
) -> list[Campaign]:
    """Single-link merge of documents with signature Jaccard > threshold.

    Campaigns are ordered by descending user count, ties broken by the
    lexicographically smallest member phone; ids are assigned in that order.
    """
    params = params or ClusteringParams()
    uf = _UnionFind(len(docs))
    for i in range(len(docs)):
        for j in range(i + 1, len(docs)):
            if jaccard(docs[i].signature, docs[j].signature) > params.jaccard_threshold:
                uf.union(i, j)
    groups: dict[int, list[PhoneDocument]] = {}
    for i, doc in enumerate(docs):
        groups.setdefault(uf.find(i), []).append(doc)

    raw: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    for members in groups.values():
        phones = tuple(sorted(d.phone for d in members))
        tweet_ids: list[str] = []
        seen: set[str] = set()
        for doc in members:
            for tid in doc.tweet_ids:
                if tid not in seen:
                    seen.add(tid)
                    tweet_ids.append(tid)
        raw.append((phones, tuple(tweet_ids)))

    def sort_key(entry: tuple[tuple[str, ...], tuple[str, ...]]) -> tuple:
        phones, tweet_ids = entry
        users = {corpus.tweets[t].user_id for t in tweet_ids}
        return (-len(users), phones[0])

    campaigns: list[Campaign] = []
    for cid, (phones, tweet_ids) in enumerate(sorted(raw, key=sort_key)):
        users = sorted({corpus.tweets[t].user_id for t in tweet_ids})
        urls = sorted({u for t in tweet_ids for u in corpus.tweets[t].urls})
        spammers = frozenset(u for u in users if corpus.users[u].suspended)
        campaigns.append(
            Campaign(
                campaign_id=cid,
                phones=phones,
                tweet_ids=tweet_ids,
                users=tuple(users),
                urls=tuple(urls),
                spammers=spammers,
            )
        )
    return campaigns


def filter_campaigns_with_spammers(campaigns: Sequence[Campaign]) -> list[Campaign]:
    """Campaigns with at least one known (suspended) spammer."""
    return [c for c in campaigns if c.spammers]


def silhouette_check(
    docs: Sequence[PhoneDocument], campaigns: Sequence[Campaign]
) -> float:
    """Mean silhouette of the document partition under 1 - Jaccard distance.

    Singleton clusters contribute 0 by convention. Requires >= 2 campaigns.
    """
    if len(campaigns) < 2:
        raise ValueError("silhouette undefined for fewer than 2 campaigns")
    phone_to_cluster = {p: c.campaign_id for c in campaigns for p in c.phones}
    labeled = [d for d in docs if d.phone in phone_to_cluster]
    if len(labeled) < 2:
        raise ValueError("silhouette undefined for fewer than 2 documents")
    n = len(labeled)
    labels = [phone_to_cluster[d.phone] for d in labeled]
    dist = [
        [1.0 - jaccard(labeled[i].signature, labeled[j].signature) for j in range(n)]
        for i in range(n)
    ]
    cluster_sizes = Counter(labels)
    scores = []
    for i in range(n):
        if cluster_sizes[labels[i]] == 1:
            scores.append(0.0)
            continue
        intra_sum = 0.0
        inter_sums: dict[int, float] = {}
        for j in range(n):
            if j == i:
                continue
            if labels[j] == labels[i]:
                intra_sum += dist[i][j]
            else:
                inter_sums[labels[j]] = inter_sums.get(labels[j], 0.0) + dist[i][j]
        a = intra_sum / (cluster_sizes[labels[i]] - 1)
        b = min(inter_sums[c] / cluster_sizes[c] for c in inter_sums)
        denom = max(a, b)
        scores.append(0.0 if denom == 0.0 else (b - a) / denom)
    return sum(scores) / n
