"""End-to-end orchestration and artifact writers.

``prepare`` runs the label-independent stages (campaign clustering, tree
construction, HITS, feature assembly); ``detect`` runs the feedback loop and
emits predictions. All stages are deterministic for a fixed seed and
independent of the worker count: parallel maps preserve input order and no
stage depends on completion order.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .campaigns import (
    Campaign,
    ClusteringParams,
    PhoneDocument,
    build_phone_documents,
    filter_campaigns_with_spammers,
    merge_into_campaigns,
)
from .corpus import Corpus
from .features import FeatureVector, assemble, feature_names, hits_scores, osn2_features
from .feedback import (
    CampaignContext,
    EnsembleState,
    Prediction,
    init_state,
    predict_all,
    run_level,
    run_until_convergence,
)
from .hin import CampaignTree, build_tree
from .hmps import score_all
from .occ import TrainConfig, smote

__all__ = [
    "RunConfig",
    "Prepared",
    "PipelineResult",
    "parallel_map",
    "prepare",
    "detect",
    "run_pipeline",
    "write_campaigns",
    "write_scores",
    "write_features",
    "write_predictions",
    "write_feedback_log",
]

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    fn: Callable[[T], R], items: Sequence[T], workers: int = 1
) -> list[R]:
    """Order-preserving map, optionally on a thread pool.

    Results are collected in input order, so the output is identical for any
    worker count.
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class RunConfig:
    clustering: ClusteringParams = field(default_factory=ClusteringParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    mode: str = "hmps+osn2"
    feedback: bool = True
    smote_ratio: float | None = None
    smote_k: int = 5
    max_levels: int | None = None
    use_grid_search: bool = False
    grid_folds: int = 4
    workers: int = 1
    seed: int = 7

    def __post_init__(self) -> None:
        feature_names(self.mode)  # validates the mode string
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def train_config(self) -> TrainConfig:
        """Training config with the run seed applied."""
        return replace(self.train, seed=self.seed)


@dataclass
class Prepared:
    """Label-independent pipeline state, reusable across detection runs."""

    corpus: Corpus
    docs: list[PhoneDocument]
    campaigns: list[Campaign]
    kept: list[Campaign]
    trees: list[CampaignTree]
    hits: dict[str, tuple[float, float]]
    osn2: dict[str, tuple[float, ...]]
    hmps_scores: dict[int, dict[str, float]]
    contexts: list[CampaignContext]
    config: RunConfig


@dataclass
class PipelineResult:
    prepared: Prepared
    state: EnsembleState
    predictions: list[Prediction]


def build_context(
    tree: CampaignTree,
    scores: dict[str, float],
    osn2: dict[str, tuple[float, ...]],
    mode: str,
) -> CampaignContext:
    rows = []
    for user in tree.users:
        block = osn2.get(user, ()) if mode == "hmps+osn2" else ()
        rows.append((scores[user],) + block)
    return CampaignContext(
        campaign_id=tree.campaign_id,
        users=tree.users,
        matrix=np.array(rows, dtype=float),
        initial_spammers=tree.spammers,
    )


def prepare(corpus: Corpus, config: RunConfig | None = None) -> Prepared:
    """Cluster campaigns, build trees, and assemble feature matrices."""
    config = config or RunConfig()
    docs = build_phone_documents(corpus, config.clustering)
    campaigns = merge_into_campaigns(docs, corpus, config.clustering)
    kept = filter_campaigns_with_spammers(campaigns)
    trees = parallel_map(lambda c: build_tree(corpus, c), kept, config.workers)
    score_maps = parallel_map(score_all, trees, config.workers)
    hmps_scores = {t.campaign_id: s for t, s in zip(trees, score_maps)}

    hits: dict[str, tuple[float, float]] = {}
    osn2: dict[str, tuple[float, ...]] = {}
    if config.mode == "hmps+osn2":
        hits = hits_scores(corpus.edges)
        users = sorted({u for t in trees for u in t.users})
        blocks = parallel_map(
            lambda u: osn2_features(corpus, u, hits), users, config.workers
        )
        osn2 = dict(zip(users, blocks))

    contexts = [
        build_context(tree, hmps_scores[tree.campaign_id], osn2, config.mode)
        for tree in trees
    ]
    return Prepared(
        corpus=corpus,
        docs=docs,
        campaigns=campaigns,
        kept=kept,
        trees=trees,
        hits=hits,
        osn2=osn2,
        hmps_scores=hmps_scores,
        contexts=contexts,
        config=config,
    )


def _smote_augment(ratio: float, k: int, seed: int) -> Callable[[np.ndarray], np.ndarray]:
    def augment(matrix: np.ndarray) -> np.ndarray:
        if matrix.shape[0] <= k:
            return matrix
        return smote(matrix, ratio, k=k, seed=seed)

    return augment


def detect(
    prepared: Prepared,
    config: RunConfig | None = None,
    contexts: Sequence[CampaignContext] | None = None,
    grid_cache: dict | None = None,
) -> tuple[EnsembleState, list[Prediction]]:
    """Run the (optionally feedback-coupled) classifier ensemble."""
    config = config or prepared.config
    contexts = prepared.contexts if contexts is None else contexts
    augment = None
    if config.smote_ratio is not None:
        augment = _smote_augment(config.smote_ratio, config.smote_k, config.seed)
    state = init_state(
        contexts,
        config.train_config(),
        use_grid_search=config.use_grid_search,
        grid_folds=config.grid_folds,
        augment=augment,
        grid_cache=grid_cache,
    )
    if config.feedback:
        run_until_convergence(state, config.max_levels)
    else:
        run_level(state, transfer=False)
    return state, predict_all(state)


def run_pipeline(corpus: Corpus, config: RunConfig | None = None) -> PipelineResult:
    config = config or RunConfig()
    prepared = prepare(corpus, config)
    state, predictions = detect(prepared, config)
    return PipelineResult(prepared=prepared, state=state, predictions=predictions)


def aggregate_predictions(predictions: Iterable[Prediction]) -> dict[str, Prediction]:
    """One row per user: the aggregate row when present, else the single row."""
    out: dict[str, Prediction] = {}
    for row in predictions:
        if row.campaign_id is None or row.user_id not in out:
            out[row.user_id] = row
    return out


# ---------------------------------------------------------------------------
# Artifact writers. All writers emit rows in deterministic order and floats
# via repr (shortest round-trip), so identical runs produce identical bytes.


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_campaigns(campaigns: Sequence[Campaign], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for c in campaigns:
            fh.write(
                json.dumps(
                    {
                        "campaign_id": c.campaign_id,
                        "phones": list(c.phones),
                        "users": list(c.users),
                        "urls": list(c.urls),
                        "tweet_count": len(c.tweet_ids),
                        "spammer_count": len(c.spammers),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def write_scores(hmps_scores: dict[int, dict[str, float]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["campaign_id", "user_id", "hmps"])
        for cid in sorted(hmps_scores):
            for user in sorted(hmps_scores[cid]):
                writer.writerow([cid, user, _fmt(hmps_scores[cid][user])])


def write_features(
    vectors: Sequence[FeatureVector], mode: str, path: str | Path
) -> None:
    names = feature_names(mode)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["campaign_id", "user_id", *names])
        for vec in vectors:
            writer.writerow(
                [vec.campaign_id, vec.user_id, *(_fmt(v) for v in vec.values())]
            )


def feature_vectors(prepared: Prepared) -> list[FeatureVector]:
    vectors: list[FeatureVector] = []
    for tree in prepared.trees:
        vectors.extend(
            assemble(
                prepared.corpus,
                tree,
                prepared.config.mode,
                prepared.hits,
                prepared.hmps_scores[tree.campaign_id],
            )
        )
    return vectors


def write_predictions(predictions: Sequence[Prediction], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["campaign_id", "user_id", "score", "label", "source"])
        for row in predictions:
            writer.writerow(
                [
                    "" if row.campaign_id is None else row.campaign_id,
                    row.user_id,
                    _fmt(row.score),
                    row.label,
                    row.source,
                ]
            )


def write_feedback_log(state: EnsembleState, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in state.log:
            fh.write(
                json.dumps(
                    {
                        "user_id": rec.user_id,
                        "from_campaign": rec.from_campaign,
                        "to_campaign": rec.to_campaign,
                        "level": rec.level,
                        "score": rec.score,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
