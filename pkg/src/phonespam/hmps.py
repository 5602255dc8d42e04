"""Hierarchical meta-path scores over a campaign tree.

The similarity of a user ``u`` to a known spammer ``s`` is the maximum
edge-weight product over the admissible meta-paths connecting them:

    length 2: u - token - s             (shared token parent)
    length 4: u - token - root - token' - s   (distinct token parents)

A user's score is the sum of that similarity over all known spammers in the
tree. Products of weights in (0, 1] keep every pair similarity in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

from .hin import CampaignTree

__all__ = ["MetaPath", "PairScore", "pair_score", "enumerate_meta_paths", "hmps", "score_all"]


@dataclass(frozen=True)
class MetaPath:
    """A concrete path, stored as the node id sequence from user to spammer."""

    nodes: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class PairScore:
    user_id: str
    spammer_id: str
    value: float
    witness: MetaPath | None


def _parents(tree: CampaignTree, user_id: str) -> list[tuple[str, float]]:
    return sorted(tree.user_weights.get(user_id, {}).items())


def pair_score(tree: CampaignTree, user_id: str, spammer_id: str) -> PairScore:
    """Best meta-path similarity between a user and one known spammer.

    Iterates the user's token parents against the spammer's token parents;
    a shared parent yields the 2-length product, distinct parents route
    through the root with both token-root weights. When a 2-length and a
    4-length path tie on value, the shorter path is kept as witness.
    """
    if user_id == spammer_id:
        raise ValueError("pair score of a user with itself is undefined")
    root = tree.root_id()
    best = 0.0
    witness: MetaPath | None = None
    for token_u, w_u in _parents(tree, user_id):
        for token_s, w_s in _parents(tree, spammer_id):
            if token_u == token_s:
                value = w_u * w_s
                nodes = (user_id, token_u, spammer_id)
            else:
                value = (
                    w_u
                    * w_s
                    * tree.token_weights[token_u]
                    * tree.token_weights[token_s]
                )
                nodes = (user_id, token_u, root, token_s, spammer_id)
            better = value > best
            shorter_tie = (
                value == best
                and witness is not None
                and len(nodes) < len(witness.nodes)
            )
            if better or shorter_tie:
                best = value
                witness = MetaPath(nodes)
    return PairScore(user_id=user_id, spammer_id=spammer_id, value=best, witness=witness)


def enumerate_meta_paths(
    tree: CampaignTree, user_id: str, spammer_id: str, max_len: int = 4
) -> list[tuple[MetaPath, float]]:
    """Every admissible meta-path between two users with its weight product.

    Used as the exhaustive route backing ``pair_score``: the maximum product
    over this list must equal the pair score.
    """
    if max_len not in (2, 4):
        raise ValueError("max_len must be 2 or 4")
    root = tree.root_id()
    out: list[tuple[MetaPath, float]] = []
    for token_u, w_u in _parents(tree, user_id):
        for token_s, w_s in _parents(tree, spammer_id):
            if token_u == token_s:
                out.append((MetaPath((user_id, token_u, spammer_id)), w_u * w_s))
            elif max_len >= 4:
                product = (
                    w_u
                    * w_s
                    * tree.token_weights[token_u]
                    * tree.token_weights[token_s]
                )
                out.append(
                    (MetaPath((user_id, token_u, root, token_s, spammer_id)), product)
                )
    out.sort(key=lambda item: (item[0].length, item[0].nodes))
    return out


def hmps(tree: CampaignTree, user_id: str) -> float:
    """Sum of pair similarities from a user to every known spammer but itself."""
    if not tree.spammers:
        raise ValueError(f"campaign {tree.campaign_id} has no known spammers")
    total = 0.0
    for spammer in sorted(tree.spammers):
        if spammer == user_id:
            continue
        total += pair_score(tree, user_id, spammer).value
    return total


def score_all(tree: CampaignTree) -> dict[str, float]:
    """HMPS for every user in the tree, keyed by user id (sorted order)."""
    return {user: hmps(tree, user) for user in tree.users}
