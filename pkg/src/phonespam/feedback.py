"""Feedback loop coupling per-campaign one-class classifiers.

Each level fits one model per campaign on its current training set (known
spammers), computes the level threshold T_max = max training score, and
selects unknown users scoring at or above it. Selections are computed
synchronously from the level-start state, then merged: a selected user is
added as a spammer to the training set of every campaign containing it,
including the origin. Only cross-campaign additions count as transfers; the
loop converges when a level produces zero transfers.

Campaigns with fewer than 2 training samples are deferred (no model) until
transfers grow their training set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .occ import OneClassModel, TrainConfig, fit, grid_search

__all__ = [
    "CampaignContext",
    "CampaignState",
    "TransferRecord",
    "Prediction",
    "EnsembleState",
    "init_state",
    "run_level",
    "run_until_convergence",
    "predict_all",
]

logger = logging.getLogger(__name__)

MIN_TRAINING = 2


@dataclass(frozen=True)
class CampaignContext:
    """Immutable per-campaign inputs: users (sorted) and their feature rows."""

    campaign_id: int
    users: tuple[str, ...]
    matrix: np.ndarray
    initial_spammers: frozenset[str]

    def __post_init__(self) -> None:
        if len(self.users) != self.matrix.shape[0]:
            raise ValueError("feature matrix rows must match user count")
        if not self.initial_spammers <= set(self.users):
            raise ValueError("initial spammers must be campaign users")

    def rows(self, users: Sequence[str]) -> np.ndarray:
        index = {u: i for i, u in enumerate(self.users)}
        return self.matrix[[index[u] for u in users]]


@dataclass
class CampaignState:
    context: CampaignContext
    training: set[str]
    config: TrainConfig | None = None
    model: OneClassModel | None = None
    t_max: float | None = None
    scores: dict[str, float] = field(default_factory=dict)

    @property
    def unknown(self) -> set[str]:
        return set(self.context.users) - self.training

    @property
    def trainable(self) -> bool:
        return len(self.training) >= MIN_TRAINING


@dataclass(frozen=True)
class TransferRecord:
    user_id: str
    from_campaign: int
    to_campaign: int
    level: int
    score: float


@dataclass(frozen=True)
class Prediction:
    campaign_id: int | None  # None marks the cross-campaign aggregate row
    user_id: str
    score: float | None
    label: str
    source: str


@dataclass
class EnsembleState:
    campaigns: dict[int, CampaignState]
    base_config: TrainConfig
    level: int = 0
    log: list[TransferRecord] = field(default_factory=list)
    converged: bool = False
    use_grid_search: bool = True
    grid_folds: int = 4
    history: list[dict[int, int]] = field(default_factory=list)
    # training-set augmentation applied before fitting (e.g. SMOTE); the
    # selection threshold still comes from the real training samples
    augment: Callable[[np.ndarray], np.ndarray] | None = None
    # memoized grid-search results shared across repeated runs (keyed so the
    # entry is valid whenever the campaign's feature matrix is unchanged)
    grid_cache: dict[tuple, TrainConfig] | None = None


def init_state(
    contexts: Sequence[CampaignContext],
    config: TrainConfig | None = None,
    use_grid_search: bool = True,
    grid_folds: int = 4,
    augment: Callable[[np.ndarray], np.ndarray] | None = None,
    grid_cache: dict[tuple, TrainConfig] | None = None,
) -> EnsembleState:
    """Initial ensemble: training = known spammers, everyone else unknown."""
    config = config or TrainConfig()
    states: dict[int, CampaignState] = {}
    for context in contexts:
        if not context.initial_spammers:
            logger.warning(
                "campaign %d has no known spammers; excluded from the ensemble",
                context.campaign_id,
            )
            continue
        states[context.campaign_id] = CampaignState(
            context=context, training=set(context.initial_spammers)
        )
    state = EnsembleState(
        campaigns=states,
        base_config=config,
        use_grid_search=use_grid_search,
        grid_folds=grid_folds,
        augment=augment,
        grid_cache=grid_cache,
    )
    state.history.append({cid: len(st.training) for cid, st in states.items()})
    return state


def _first_entry(config: TrainConfig) -> TrainConfig:
    return replace(
        config, nu_grid=(config.nu_grid[0],), gamma_grid=(config.gamma_grid[0],)
    )


def _pinned_config(state: EnsembleState, st: CampaignState, matrix: np.ndarray) -> TrainConfig:
    if st.config is None:
        if not state.use_grid_search:
            st.config = _first_entry(state.base_config)
        elif matrix.shape[0] < 3:
            # a 2-sample set cannot be cross-validated and degenerately
            # accepts both points under every config; pin the first entry
            st.config = _first_entry(state.base_config)
        else:
            key = (
                st.context.campaign_id,
                st.context.initial_spammers,
                frozenset(st.training),
            )
            if state.grid_cache is not None and key in state.grid_cache:
                st.config = state.grid_cache[key]
            else:
                st.config = grid_search(matrix, state.base_config, folds=state.grid_folds)
                if state.grid_cache is not None:
                    state.grid_cache[key] = st.config
    return st.config


def run_level(state: EnsembleState, transfer: bool = True) -> int:
    """Run one synchronous level; returns the count of cross-campaign additions.

    With ``transfer`` False the models are fitted and scored but no training
    set changes are applied (single-pass mode).
    """
    level = state.level + 1
    selections: list[tuple[int, str, float]] = []
    training_at_start = {cid: frozenset(st.training) for cid, st in state.campaigns.items()}

    for cid in sorted(state.campaigns):
        st = state.campaigns[cid]
        if not st.trainable:
            st.model = None
            st.t_max = None
            st.scores = {}
            continue
        train_users = sorted(st.training)
        train_matrix = st.context.rows(train_users)
        config = _pinned_config(state, st, train_matrix)
        fit_matrix = state.augment(train_matrix) if state.augment else train_matrix
        st.model = fit(fit_matrix, config)
        all_scores = st.model.score_many(st.context.matrix)
        st.scores = {u: float(s) for u, s in zip(st.context.users, all_scores)}
        st.t_max = max(st.scores[u] for u in train_users)
        for user in sorted(st.unknown):
            if st.scores[user] >= st.t_max:
                selections.append((cid, user, st.scores[user]))

    cross_pairs: set[tuple[str, int]] = set()
    if transfer:
        member_sets = {
            cid: set(st.context.users) for cid, st in state.campaigns.items()
        }
        for origin, user, score in sorted(selections, key=lambda s: (s[0], s[1])):
            for target_cid in sorted(state.campaigns):
                target = state.campaigns[target_cid]
                if user in member_sets[target_cid] and user not in training_at_start[target_cid]:
                    state.log.append(
                        TransferRecord(
                            user_id=user,
                            from_campaign=origin,
                            to_campaign=target_cid,
                            level=level,
                            score=score,
                        )
                    )
                    target.training.add(user)
                    if target_cid != origin:
                        cross_pairs.add((user, target_cid))

    state.level = level
    state.history.append(
        {cid: len(st.training) for cid, st in state.campaigns.items()}
    )
    return len(cross_pairs)


def run_until_convergence(state: EnsembleState, max_levels: int | None = None) -> EnsembleState:
    """Repeat levels until no cross-campaign transfer happens.

    Terminates within the number of distinct users in the worst case because
    every transferring level strictly shrinks some unknown set.
    """
    if max_levels is None:
        max_levels = sum(len(st.context.users) for st in state.campaigns.values()) + 1
    while state.level < max_levels:
        transfers = run_level(state)
        if transfers == 0:
            state.converged = True
            return state
    state.converged = False
    return state


_SOURCE_RANK = {"training": 0, "feedback": 1, "predicted": 2}


def predict_all(state: EnsembleState) -> list[Prediction]:
    """Final labels for every (campaign, user) pair plus aggregate rows.

    Users of campaigns that never became trainable have no score and default
    to benign. A user in >= 2 campaigns also gets an aggregate row
    (campaign_id None) with its max score and spammer-if-any label.
    """
    predictions: list[Prediction] = []
    by_user: dict[str, list[Prediction]] = {}
    for cid in sorted(state.campaigns):
        st = state.campaigns[cid]
        for user in st.context.users:
            score = st.scores.get(user)
            if user in st.context.initial_spammers:
                source, label = "training", "spammer"
            elif user in st.training:
                source, label = "feedback", "spammer"
            else:
                source = "predicted"
                label = "spammer" if score is not None and score >= 0.0 else "benign"
            row = Prediction(cid, user, score, label, source)
            predictions.append(row)
            by_user.setdefault(user, []).append(row)

    for user in sorted(by_user):
        rows = by_user[user]
        if len(rows) < 2:
            continue
        scores = [r.score for r in rows if r.score is not None]
        predictions.append(
            Prediction(
                campaign_id=None,
                user_id=user,
                score=max(scores) if scores else None,
                label="spammer" if any(r.label == "spammer" for r in rows) else "benign",
                source=min((r.source for r in rows), key=_SOURCE_RANK.__getitem__),
            )
        )
    return predictions
