"""Deterministic synthetic corpora with planted campaigns and spammers.

Each planted campaign owns a disjoint word signature, a few phone numbers,
one promoted URL, and two hashtags. Spammer timelines are built from two
tweet templates with identical composition (one URL, two hashtags, and the
same token count), so content-ratio profiles cannot separate spammers from
each other; what separates them is how many tweets they aim at the campaign
tokens. Suspended accounts (the known labels) come in a low-volume and a
high-volume band, and hidden spammers sit between the bands, so a one-class
model trained on the known labels brackets the hidden ones.

The first campaigns are trainable (several suspended accounts each); the
rest are deferred with exactly one suspended account. Cross-campaign
membership is governed by ``overlap_fraction``: one hidden spammer per
deferred campaign also promotes that campaign (the traffic the feedback
loop propagates), and the remaining overlap quota is filled by benign
users who split their tweets between two campaigns. With
``overlap_fraction=0`` every user, spammer or benign, posts in exactly
one campaign.

Benign users tweet the campaign phones and signature words at low volume
with sporadic unique URLs and hashtags, and they follow only benign users,
while each campaign's own spammers form a complete follow clique.

Generation draws from a single seeded generator in a fixed order: two runs
with the same config produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

__all__ = ["SynthConfig", "generate"]


@dataclass(frozen=True)
class SynthConfig:
    n_campaigns: int = 20
    users_per_campaign: int = 50
    deferred_fraction: float = 0.5
    overlap_fraction: float = 0.21
    suspended_low_users: int = 4
    suspended_low_tweets: int = 4
    suspended_high_users: int = 4
    suspended_high_tweets: int = 10
    hidden_per_campaign: int = 12
    hidden_tweets: int = 6
    deferred_suspended_tweets: int = 8
    bridge_tweets: int = 8
    tweets_per_user: int = 8
    words_per_tweet: int = 10
    signature_size: int = 30
    phones_per_campaign: int = 3
    benign_url_rate: float = 0.2
    benign_hashtag_rate: float = 0.3
    benign_follows: int = 2
    seed: int = 7

    @property
    def spam_per_campaign(self) -> int:
        return (self.suspended_low_users + self.suspended_high_users
                + self.hidden_per_campaign)

    @property
    def benign_per_campaign(self) -> int:
        return self.users_per_campaign - self.spam_per_campaign

    @property
    def n_deferred(self) -> int:
        return round(self.deferred_fraction * self.n_campaigns)

    def __post_init__(self) -> None:
        if not (1 <= self.n_campaigns <= 99):
            raise ValueError("n_campaigns must be in [1, 99]")
        if not (1 <= self.phones_per_campaign <= 99):
            raise ValueError("phones_per_campaign must be in [1, 99]")
        if not (0.0 <= self.deferred_fraction <= 1.0):
            raise ValueError("deferred_fraction must be in [0, 1]")
        if not (0.0 <= self.overlap_fraction <= 1.0):
            raise ValueError("overlap_fraction must be in [0, 1]")
        if self.suspended_low_users + self.suspended_high_users < 2:
            raise ValueError("trainable campaigns need >= 2 suspended users")
        if self.hidden_per_campaign < 1:
            raise ValueError("need >= 1 hidden spammer per campaign")
        if self.benign_follows < 1:
            raise ValueError("benign_follows must be >= 1")
        if self.benign_per_campaign < self.benign_follows + 1:
            raise ValueError(
                "users_per_campaign leaves too few benign users: need at "
                "least benign_follows + 1 beyond the spammer block"
            )
        counts = (
            self.suspended_low_tweets,
            self.suspended_high_tweets,
            self.hidden_tweets,
            self.deferred_suspended_tweets,
            self.bridge_tweets,
        )
        if any(k < 1 for k in counts):
            raise ValueError("all tweet counts must be >= 1")
        if self.tweets_per_user < 2:
            raise ValueError("tweets_per_user must be >= 2")
        if self.signature_size < 6:
            raise ValueError("signature_size must be >= 6")
        if not (6 <= self.words_per_tweet <= self.signature_size):
            raise ValueError("words_per_tweet must be in [6, signature_size]")
        n_trainable = self.n_campaigns - self.n_deferred
        if self.overlap_fraction > 0.0 and self.n_deferred > 0:
            if n_trainable < 1:
                raise ValueError(
                    "deferred campaigns need at least one trainable campaign "
                    "to host their bridge spammers"
                )
            if -(-self.n_deferred // n_trainable) > self.hidden_per_campaign:
                raise ValueError(
                    "not enough hidden spammers per trainable campaign to "
                    "bridge every deferred campaign"
                )
        if self._benign_dual_total() > 0 and self.n_campaigns < 2:
            raise ValueError("cross-campaign overlap needs >= 2 campaigns")
        quota = -(-self._benign_dual_total() // self.n_campaigns)
        if quota > self.benign_per_campaign:
            raise ValueError(
                "overlap_fraction too large for the benign population"
            )

    def _spam_bridge_total(self) -> int:
        if self.overlap_fraction <= 0.0:
            return 0
        return self.n_deferred

    def _benign_dual_total(self) -> int:
        n_users = self.n_campaigns * self.users_per_campaign
        target = round(self.overlap_fraction * n_users)
        return max(0, target - self._spam_bridge_total())


def _phone(campaign: int, slot: int) -> str:
    return f"+1555{campaign:02d}{slot:02d}000"


def _url(campaign: int) -> str:
    return f"http://camp{campaign:02d}.example/offer"


def _signature(config: SynthConfig, campaign: int) -> list[str]:
    return [f"s{campaign:02d}w{i:02d}" for i in range(config.signature_size)]


def _spam_on_text(config: SynthConfig, campaign: int) -> str:
    """Campaign-promotion template: every signature word, both campaign
    hashtags, the campaign URL, and the primary phone."""
    tokens = _signature(config, campaign)
    tokens += [f"#deal{campaign:02d}", f"#win{campaign:02d}"]
    tokens += [_url(campaign), _phone(campaign, 0)]
    return " ".join(tokens)


def _spam_off_text(config: SynthConfig, uid: str, tweet: int) -> str:
    """Filler template with the same composition as the promotion template
    (token count, one URL, two hashtags) but no phone and no shared words."""
    tokens = [f"q{uid}t{tweet}w{j:02d}" for j in range(config.signature_size + 1)]
    tokens += [f"#q{uid}t{tweet}a", f"#q{uid}t{tweet}b"]
    tokens += [f"http://off.example/{uid}/t{tweet}"]
    return " ".join(tokens)


@dataclass
class _UserPlan:
    uid: str
    role: str  # "suspended" | "hidden" | "benign"
    campaigns: list[int]
    on_tweets: list[tuple[int, int]]  # (campaign, count) promotion tweets
    off_tweets: int = 0
    benign_plan: list[tuple[int, int]] | None = None  # (campaign, count)


def _plan_users(config: SynthConfig) -> list[_UserPlan]:
    n_deferred = config.n_deferred
    n_trainable = config.n_campaigns - n_deferred
    plans: list[_UserPlan] = []
    by_uid: dict[str, _UserPlan] = {}

    def add(plan: _UserPlan) -> None:
        plans.append(plan)
        by_uid[plan.uid] = plan

    benign_dual_total = config._benign_dual_total()
    base_quota, extra = divmod(benign_dual_total, config.n_campaigns)

    for c in range(config.n_campaigns):
        if c < n_trainable:
            bands = [(config.suspended_low_users, config.suspended_low_tweets),
                     (config.suspended_high_users, config.suspended_high_tweets)]
            i = 0
            for n_users, n_tweets in bands:
                for _ in range(n_users):
                    add(_UserPlan(uid=f"c{c:02d}s{i:02d}", role="suspended",
                                  campaigns=[c], on_tweets=[(c, n_tweets)]))
                    i += 1
            for i in range(config.hidden_per_campaign):
                add(_UserPlan(uid=f"c{c:02d}h{i:02d}", role="hidden",
                              campaigns=[c], on_tweets=[(c, config.hidden_tweets)]))
        else:
            add(_UserPlan(uid=f"c{c:02d}s00", role="suspended", campaigns=[c],
                          on_tweets=[(c, config.deferred_suspended_tweets)]))
            for i in range(config.spam_per_campaign - 1):
                add(_UserPlan(uid=f"c{c:02d}h{i:02d}", role="hidden",
                              campaigns=[c],
                              on_tweets=[(c, config.hidden_tweets)]))
        quota = base_quota + (1 if c < extra else 0)
        for i in range(config.benign_per_campaign):
            plan = [(c, config.tweets_per_user)]
            second = None
            if i < quota:
                second = (c + 1 + (i % (config.n_campaigns - 1))) % config.n_campaigns
                half = config.tweets_per_user // 2
                plan = [(c, config.tweets_per_user - half), (second, half)]
            add(_UserPlan(uid=f"c{c:02d}b{i:02d}", role="benign",
                          campaigns=[c] + ([second] if second is not None else []),
                          on_tweets=[], benign_plan=plan))

    # One hidden spammer per deferred campaign also promotes that campaign.
    for d in range(config._spam_bridge_total()):
        host = d % n_trainable
        slot = d // n_trainable
        target = n_trainable + d
        bridge = by_uid[f"c{host:02d}h{slot:02d}"]
        bridge.campaigns.append(target)
        bridge.on_tweets.append((target, config.bridge_tweets))

    # Spam timelines are padded with filler tweets up to the shared minimum.
    for plan in plans:
        if plan.role != "benign":
            total = sum(k for _, k in plan.on_tweets)
            plan.off_tweets = max(0, config.tweets_per_user - total)
    return plans


def generate(config: SynthConfig | None = None, out_dir: str | Path = ".") -> dict[str, Path]:
    """Write tweets.jsonl, users.jsonl, edges.csv, and truth.json."""
    config = config or SynthConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(config.seed)
    plans = _plan_users(config)
    signatures = {c: _signature(config, c) for c in range(config.n_campaigns)}

    base_time = datetime(2023, 1, 1)
    tweet_no = 0
    tweets_path = out_dir / "tweets.jsonl"

    def emit(fh, uid: str, text: str) -> None:
        nonlocal tweet_no
        stamp = (base_time + timedelta(minutes=tweet_no)).isoformat() + "Z"
        fh.write(json.dumps(
            {"id": f"t{tweet_no:07d}", "user_id": uid, "text": text,
             "created_at": stamp},
            sort_keys=True) + "\n")
        tweet_no += 1

    with tweets_path.open("w", encoding="utf-8") as fh:
        for plan in plans:
            for c, count in plan.on_tweets:
                for _ in range(count):
                    emit(fh, plan.uid, _spam_on_text(config, c))
            for t in range(plan.off_tweets):
                emit(fh, plan.uid, _spam_off_text(config, plan.uid, t))
            for c, count in plan.benign_plan or []:
                for t in range(count):
                    words = [str(w) for w in rng.choice(
                        signatures[c], size=config.words_per_tweet, replace=False)]
                    slot = int(rng.integers(0, config.phones_per_campaign))
                    tokens = words + [_phone(c, slot)]
                    if rng.random() < config.benign_url_rate:
                        tokens.append(f"http://b.example/{plan.uid}/t{c}x{t}")
                    if rng.random() < config.benign_hashtag_rate:
                        tokens.append(f"#v{plan.uid}t{c}x{t}")
                    emit(fh, plan.uid, " ".join(tokens))

    # Follow edges: each campaign's own spammers form a complete clique
    # (bridge spammers keep only their home clique); benign users follow a
    # few benign users from their home campaign.
    edges: set[tuple[str, str]] = set()
    home_spam: dict[int, list[str]] = {c: [] for c in range(config.n_campaigns)}
    home_benign: dict[int, list[str]] = {c: [] for c in range(config.n_campaigns)}
    for plan in plans:
        if plan.role == "benign":
            home_benign[plan.campaigns[0]].append(plan.uid)
        else:
            home_spam[plan.campaigns[0]].append(plan.uid)
    for c in range(config.n_campaigns):
        clique = home_spam[c]
        for a in clique:
            for b in clique:
                if a != b:
                    edges.add((a, b))
    for plan in plans:
        if plan.role != "benign":
            continue
        pool = [u for u in home_benign[plan.campaigns[0]] if u != plan.uid]
        n_follow = min(config.benign_follows, len(pool))
        for pick in rng.choice(len(pool), size=n_follow, replace=False):
            edges.add((plan.uid, pool[int(pick)]))

    edges_path = out_dir / "edges.csv"
    with edges_path.open("w", encoding="utf-8") as fh:
        fh.write("follower,followee\n")
        for follower, followee in sorted(edges):
            fh.write(f"{follower},{followee}\n")

    in_deg: dict[str, int] = {}
    out_deg: dict[str, int] = {}
    for follower, followee in edges:
        out_deg[follower] = out_deg.get(follower, 0) + 1
        in_deg[followee] = in_deg.get(followee, 0) + 1

    users_path = out_dir / "users.jsonl"
    with users_path.open("w", encoding="utf-8") as fh:
        for plan in plans:
            fh.write(json.dumps(
                {"user_id": plan.uid,
                 "followers_count": in_deg.get(plan.uid, 0),
                 "friends_count": out_deg.get(plan.uid, 0),
                 "suspended": plan.role == "suspended",
                 "annotated_label": "benign" if plan.role == "benign" else "spammer"},
                sort_keys=True) + "\n")

    n_trainable = config.n_campaigns - config.n_deferred
    truth = {
        "config": asdict(config),
        "campaign_of_phone": {
            _phone(c, p): c
            for c in range(config.n_campaigns)
            for p in range(config.phones_per_campaign)
        },
        "trainable_campaigns": list(range(n_trainable)),
        "deferred_campaigns": list(range(n_trainable, config.n_campaigns)),
        "memberships": {p.uid: sorted(p.campaigns) for p in plans},
        "spammers": sorted(p.uid for p in plans if p.role != "benign"),
        "suspended": sorted(p.uid for p in plans if p.role == "suspended"),
        "hidden": sorted(p.uid for p in plans if p.role == "hidden"),
        "overlap_users": sorted(p.uid for p in plans if len(p.campaigns) > 1),
        "bridge_spammers": {
            p.uid: p.campaigns[1:] for p in plans
            if p.role != "benign" and len(p.campaigns) > 1
        },
    }
    truth_path = out_dir / "truth.json"
    truth_path.write_text(json.dumps(truth, indent=2, sort_keys=True), encoding="utf-8")

    return {
        "tweets": tweets_path,
        "users": users_path,
        "edges": edges_path,
        "truth": truth_path,
    }
