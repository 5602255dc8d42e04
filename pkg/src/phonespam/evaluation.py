"""Evaluation protocols and metrics.

Setting 1: leave-one-out over suspended users. Each fold hides one suspended
user's label, reruns detection, and checks whether the user is recovered as
a spammer; accuracy is the recovered fraction.

Setting 2: repeated stratified holdout over annotated users. Detection never
consumes annotated labels, so predictions are computed once and each repeat
scores a different held-out subset.

The ablation grid compares feedback, no-feedback, and SMOTE-augmented
no-feedback runs on identical features.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .corpus import Corpus, CorpusError
from .feedback import Prediction
from .hin import CampaignTree
from .hmps import score_all
from .pipeline import (
    Prepared,
    RunConfig,
    aggregate_predictions,
    build_context,
    detect,
    prepare,
)

__all__ = [
    "ConfusionCounts",
    "MetricsReport",
    "auc_score",
    "metrics",
    "evaluate_predictions",
    "setting1_loo",
    "setting2_holdout",
    "ablation_suite",
    "SMOTE_RATIOS",
]

SMOTE_RATIOS: tuple[float, ...] = (0.20, 0.30, 0.50, 0.75, 1.0)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    auc: float | None = None
    accuracy: float | None = None
    setting: str = ""
    config: dict | None = None

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "accuracy": self.accuracy,
            "setting": self.setting,
            "config": self.config,
        }


def auc_score(scores: Sequence[float], labels: Sequence[bool]) -> float | None:
    """Rank-statistic AUC with ties counted half; None for a single class."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores, method="average")
    pos_rank_sum = float(ranks[labels].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def metrics(
    counts: ConfusionCounts,
    scored: Iterable[tuple[float, bool]] | None = None,
    setting: str = "",
    config: dict | None = None,
) -> MetricsReport:
    """Precision/recall/F1/accuracy from counts; denominator 0 maps to 0.0."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0.0
        else 0.0
    )
    accuracy = (counts.tp + counts.tn) / counts.total if counts.total else 0.0
    auc = None
    if scored is not None:
        pairs = list(scored)
        auc = auc_score([s for s, _ in pairs], [y for _, y in pairs])
    return MetricsReport(
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc,
        accuracy=accuracy,
        setting=setting,
        config=config,
    )


def evaluate_predictions(
    predictions: Sequence[Prediction],
    truth: dict[str, bool],
    setting: str = "",
    config: dict | None = None,
) -> MetricsReport:
    """Score aggregate per-user predictions against a truth map.

    Users without any prediction count as benign-predicted with the lowest
    possible score (they were never attached to a scored campaign).
    """
    agg = aggregate_predictions(predictions)
    counts = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    scored: list[tuple[float, bool]] = []
    for user in sorted(truth):
        is_spammer = truth[user]
        row = agg.get(user)
        predicted = row is not None and row.label == "spammer"
        score = row.score if row is not None and row.score is not None else -np.inf
        scored.append((score, is_spammer))
        if predicted and is_spammer:
            counts["tp"] += 1
        elif predicted:
            counts["fp"] += 1
        elif is_spammer:
            counts["fn"] += 1
        else:
            counts["tn"] += 1
    return metrics(ConfusionCounts(**counts), scored, setting=setting, config=config)


def _fold_contexts(prepared: Prepared, holdout: str) -> list:
    """Campaign contexts with one suspended user's label hidden.

    Only campaigns containing the held-out user change (their spammer sets,
    hence their score columns); all other contexts are reused as-is.
    Campaigns left without any known spammer drop out for the fold.
    """
    contexts = []
    for tree, context in zip(prepared.trees, prepared.contexts):
        if holdout not in tree.spammers:
            contexts.append(context)
            continue
        masked: CampaignTree = dc_replace(tree, spammers=tree.spammers - {holdout})
        if not masked.spammers:
            continue
        contexts.append(
            build_context(
                masked,
                score_all(masked),
                prepared.osn2,
                prepared.config.mode,
            )
        )
    return contexts


def setting1_loo(
    corpus: Corpus, config: RunConfig | None = None, prepared: Prepared | None = None
) -> MetricsReport:
    """Leave-one-out recovery accuracy over suspended campaign users."""
    config = config or RunConfig()
    if prepared is None:
        prepared = prepare(corpus, config)
    suspended = sorted({u for tree in prepared.trees for u in tree.spammers})
    if not suspended:
        raise CorpusError("no suspended users attached to any campaign")
    grid_cache: dict = {}
    recovered = 0
    for holdout in suspended:
        contexts = _fold_contexts(prepared, holdout)
        _, predictions = detect(prepared, config, contexts=contexts, grid_cache=grid_cache)
        agg = aggregate_predictions(predictions)
        row = agg.get(holdout)
        if row is not None and row.label == "spammer":
            recovered += 1
    accuracy = recovered / len(suspended)
    return MetricsReport(
        recall=accuracy,
        accuracy=accuracy,
        setting="setting1_loo",
        config={"folds": len(suspended), "mode": config.mode, "feedback": config.feedback},
    )


def _annotated_truth(corpus: Corpus) -> dict[str, bool]:
    """Truth map over annotated, non-suspended users."""
    return {
        u.user_id: u.annotated_label == "spammer"
        for u in corpus.users.values()
        if u.annotated_label is not None and not u.suspended
    }


def setting2_holdout(
    corpus: Corpus,
    config: RunConfig | None = None,
    holdout_frac: float = 0.2,
    repeats: int = 20,
    prepared: Prepared | None = None,
) -> MetricsReport:
    """Repeated stratified holdout over annotated users, metrics averaged."""
    config = config or RunConfig()
    if not (0.0 < holdout_frac < 1.0):
        raise ValueError("holdout_frac must be in (0, 1)")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    truth = _annotated_truth(corpus)
    if len(truth) < 10:
        raise CorpusError(f"setting 2 needs >= 10 annotated users, got {len(truth)}")
    if prepared is None:
        prepared = prepare(corpus, config)
    _, predictions = detect(prepared, config)

    rng = np.random.default_rng(config.seed)
    spammers = sorted(u for u, y in truth.items() if y)
    benign = sorted(u for u, y in truth.items() if not y)
    reports = []
    for _ in range(repeats):
        held: list[str] = []
        for pool in (spammers, benign):
            n_hold = max(1, int(round(holdout_frac * len(pool)))) if pool else 0
            if pool:
                picks = rng.choice(len(pool), size=n_hold, replace=False)
                held.extend(pool[i] for i in sorted(picks))
        fold_truth = {u: truth[u] for u in held}
        reports.append(evaluate_predictions(predictions, fold_truth))

    def _mean(values: list[float | None]) -> float | None:
        present = [v for v in values if v is not None]
        return float(np.mean(present)) if present else None

    return MetricsReport(
        precision=_mean([r.precision for r in reports]),
        recall=_mean([r.recall for r in reports]),
        f1=_mean([r.f1 for r in reports]),
        auc=_mean([r.auc for r in reports]),
        accuracy=_mean([r.accuracy for r in reports]),
        setting="setting2_holdout",
        config={
            "holdout_frac": holdout_frac,
            "repeats": repeats,
            "annotated": len(truth),
            "mode": config.mode,
            "feedback": config.feedback,
        },
    )


def ablation_suite(
    corpus: Corpus, config: RunConfig | None = None, prepared: Prepared | None = None
) -> list[tuple[str, MetricsReport]]:
    """Feedback vs no-feedback vs SMOTE-augmented rows on identical features."""
    config = config or RunConfig()
    if prepared is None:
        prepared = prepare(corpus, config)
    truth = _annotated_truth(corpus)
    if not truth:
        raise CorpusError("ablation needs annotated non-suspended users")

    variants: list[tuple[str, RunConfig]] = [
        ("feedback", dc_replace(config, feedback=True, smote_ratio=None)),
        ("no_feedback", dc_replace(config, feedback=False, smote_ratio=None)),
    ]
    for ratio in SMOTE_RATIOS:
        variants.append(
            (f"smote_{ratio:.2f}", dc_replace(config, feedback=False, smote_ratio=ratio))
        )
    grid_cache: dict = {}
    out = []
    for name, variant in variants:
        _, predictions = detect(prepared, variant, grid_cache=grid_cache)
        report = evaluate_predictions(
            predictions,
            truth,
            setting=f"ablation:{name}",
            config={"mode": variant.mode, "feedback": variant.feedback,
                    "smote_ratio": variant.smote_ratio},
        )
        out.append((name, report))
    return out
