"""One-class classification of campaign users.

A nu-parameterized one-class SVM is fitted on the known-spammer vectors of a
campaign. Feature columns are z-scored with statistics of the training set
only; fitted models keep those statistics plus the support expansion, so a
serialized model is self-contained. Scores are signed margin distances:
score >= 0 means accepted (spammer-like).

SMOTE-style oversampling is provided for the ablation study: each synthetic
point lies strictly between a training point and one of its k nearest
neighbors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from sklearn.svm import OneClassSVM

__all__ = [
    "InsufficientTrainingError",
    "TrainConfig",
    "Standardizer",
    "OneClassModel",
    "fit",
    "grid_search",
    "smote",
]

_KERNELS = ("rbf", "linear")


class InsufficientTrainingError(ValueError):
    """Raised when a campaign has fewer than 2 training samples."""


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for fitting and grid search.

    ``fit`` uses the first entry of each grid; ``grid_search`` returns a
    config with both grids narrowed to the selected point.
    """

    nu_grid: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)
    gamma_grid: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0)
    kernel: str = "rbf"
    seed: int = 0
    max_iter: int = 100_000
    tol: float = 1e-6

    def __post_init__(self) -> None:
        if not self.nu_grid or not self.gamma_grid:
            raise ValueError("hyperparameter grids must be nonempty")
        if any(not (0.0 < nu <= 1.0) for nu in self.nu_grid):
            raise ValueError("nu values must be in (0, 1]")
        if any(g <= 0.0 for g in self.gamma_grid):
            raise ValueError("gamma values must be positive")
        if self.kernel not in _KERNELS:
            raise ValueError(f"kernel must be one of {_KERNELS}")

    @property
    def nu(self) -> float:
        return self.nu_grid[0]

    @property
    def gamma(self) -> float:
        return self.gamma_grid[0]


@dataclass(frozen=True)
class Standardizer:
    """Column z-scoring with training-set statistics.

    Columns whose training spread is zero or below the float64 noise floor
    (1e-12) keep scale 1 instead: dividing by rounding-level jitter would
    blow meaningless offsets up to arbitrary z-magnitudes.
    """

    mean: tuple[float, ...]
    scale: tuple[float, ...]

    _MIN_SCALE = 1e-12

    @classmethod
    def from_training(cls, matrix: np.ndarray) -> "Standardizer":
        mean = matrix.mean(axis=0)
        scale = matrix.std(axis=0)
        scale = np.where(scale <= cls._MIN_SCALE, 1.0, scale)
        return cls(mean=tuple(map(float, mean)), scale=tuple(map(float, scale)))

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        return (np.asarray(matrix, dtype=float) - np.array(self.mean)) / np.array(
            self.scale
        )


@dataclass(frozen=True)
class OneClassModel:
    """Fitted nu-OCSVM in explicit form: score(x) = sum_i a_i K(z, sv_i) + b."""

    kernel: str
    nu: float
    gamma: float | None
    standardizer: Standardizer
    support_vectors: tuple[tuple[float, ...], ...]
    dual_coef: tuple[float, ...]
    intercept: float
    config: TrainConfig = field(default_factory=TrainConfig)

    @property
    def feature_dim(self) -> int:
        return len(self.standardizer.mean)

    def score(self, x: np.ndarray) -> float:
        """Signed margin distance of one vector; >= 0 means accepted."""
        return float(self.score_many(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def score_many(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] != self.feature_dim:
            raise ValueError(
                f"expected vectors of dimension {self.feature_dim}, "
                f"got shape {matrix.shape}"
            )
        z = self.standardizer.transform(matrix)
        sv = np.array(self.support_vectors, dtype=float)
        alpha = np.array(self.dual_coef, dtype=float)
        if self.kernel == "rbf":
            sq = ((z[:, None, :] - sv[None, :, :]) ** 2).sum(axis=2)
            k = np.exp(-self.gamma * sq)
        else:
            k = z @ sv.T
        return k @ alpha + self.intercept

    def decide(self, x: np.ndarray) -> bool:
        return self.score(x) >= 0.0

    def to_dict(self) -> dict:
        return {
            "kind": f"{self.kernel}_nu_ocsvm",
            "nu": self.nu,
            "gamma": self.gamma,
            "standardizer": {
                "mean": list(self.standardizer.mean),
                "scale": list(self.standardizer.scale),
            },
            "support_vectors": [list(v) for v in self.support_vectors],
            "dual_coef": list(self.dual_coef),
            "intercept": self.intercept,
            "config": {
                "nu_grid": list(self.config.nu_grid),
                "gamma_grid": list(self.config.gamma_grid),
                "kernel": self.config.kernel,
                "seed": self.config.seed,
                "max_iter": self.config.max_iter,
                "tol": self.config.tol,
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "OneClassModel":
        cfg = payload["config"]
        return cls(
            kernel=payload["kind"].split("_")[0],
            nu=float(payload["nu"]),
            gamma=None if payload["gamma"] is None else float(payload["gamma"]),
            standardizer=Standardizer(
                mean=tuple(payload["standardizer"]["mean"]),
                scale=tuple(payload["standardizer"]["scale"]),
            ),
            support_vectors=tuple(tuple(v) for v in payload["support_vectors"]),
            dual_coef=tuple(payload["dual_coef"]),
            intercept=float(payload["intercept"]),
            config=TrainConfig(
                nu_grid=tuple(cfg["nu_grid"]),
                gamma_grid=tuple(cfg["gamma_grid"]),
                kernel=cfg["kernel"],
                seed=int(cfg["seed"]),
                max_iter=int(cfg["max_iter"]),
                tol=float(cfg["tol"]),
            ),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "OneClassModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _as_matrix(training: np.ndarray | list) -> np.ndarray:
    if isinstance(training, np.ndarray):
        matrix = np.asarray(training, dtype=float)
    else:
        matrix = np.array(
            [t.values() if hasattr(t, "values") and callable(t.values) else t for t in training],
            dtype=float,
        )
    if matrix.ndim != 2:
        raise ValueError("training data must be a 2-D matrix of feature vectors")
    return matrix


def fit(training: np.ndarray | list, config: TrainConfig | None = None) -> OneClassModel:
    """Fit a one-class SVM on target-class vectors only.

    Uses the first entry of each hyperparameter grid; run ``grid_search``
    beforehand to pin a selection. Fewer than 2 samples raise
    InsufficientTrainingError.
    """
    config = config or TrainConfig()
    matrix = _as_matrix(training)
    if matrix.shape[0] < 2:
        raise InsufficientTrainingError(
            f"one-class training needs >= 2 samples, got {matrix.shape[0]}"
        )
    standardizer = Standardizer.from_training(matrix)
    z = standardizer.transform(matrix)
    gamma = config.gamma if config.kernel == "rbf" else None
    svm = OneClassSVM(
        kernel=config.kernel,
        nu=config.nu,
        gamma=gamma if gamma is not None else "scale",
        tol=config.tol,
        max_iter=config.max_iter,
    )
    svm.fit(z)
    return OneClassModel(
        kernel=config.kernel,
        nu=config.nu,
        gamma=gamma,
        standardizer=standardizer,
        support_vectors=tuple(tuple(map(float, v)) for v in svm.support_vectors_),
        dual_coef=tuple(map(float, svm.dual_coef_[0])),
        intercept=float(svm.intercept_[0]),
        config=config,
    )


def _background_sample(
    matrix: np.ndarray, rng: np.random.Generator, size: int = 256
) -> np.ndarray:
    lo = matrix.min(axis=0)
    hi = matrix.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    return rng.uniform(lo - 0.5 * span, hi + 0.5 * span, size=(size, matrix.shape[1]))


def _fold_slices(n: int, folds: int) -> list[np.ndarray]:
    indices = np.arange(n)
    return [indices[f::folds] for f in range(folds)]


def grid_search(
    training: np.ndarray | list, config: TrainConfig | None = None, folds: int = 1
) -> TrainConfig:
    """Select (nu, gamma) over the config grids.

    Objective: fraction of held-in training vectors accepted minus fraction
    of a uniform background sample accepted (a boundary-volume proxy). With
    ``folds`` > 1 the held-in term is cross-validated acceptance on held-out
    folds. Ties keep the earliest grid point; the background sample is drawn
    once with the config seed so every grid point sees the same sample.
    """
    config = config or TrainConfig()
    matrix = _as_matrix(training)
    n = matrix.shape[0]
    if n < 2:
        raise InsufficientTrainingError(f"grid search needs >= 2 samples, got {n}")
    rng = np.random.default_rng(config.seed)
    background = _background_sample(matrix, rng)
    gamma_grid = config.gamma_grid if config.kernel == "rbf" else (config.gamma_grid[0],)
    # every fold must leave >= 2 training samples
    folds = min(folds, n) if n - int(np.ceil(n / min(folds, n))) >= 2 else 1

    best: tuple[float, float] | None = None
    best_objective = -np.inf
    for nu in config.nu_grid:
        for gamma in gamma_grid:
            candidate = replace(config, nu_grid=(nu,), gamma_grid=(gamma,))
            if folds > 1:
                accept_fracs = []
                bg_fracs = []
                for held_out in _fold_slices(n, folds):
                    mask = np.ones(n, dtype=bool)
                    mask[held_out] = False
                    model = fit(matrix[mask], candidate)
                    accept_fracs.append(
                        float((model.score_many(matrix[held_out]) >= 0.0).mean())
                    )
                    bg_fracs.append(
                        float((model.score_many(background) >= 0.0).mean())
                    )
                objective = float(np.mean(accept_fracs)) - float(np.mean(bg_fracs))
            else:
                model = fit(matrix, candidate)
                held_in = float((model.score_many(matrix) >= 0.0).mean())
                bg = float((model.score_many(background) >= 0.0).mean())
                objective = held_in - bg
            if objective > best_objective:
                best_objective = objective
                best = (nu, gamma)
    assert best is not None
    return replace(config, nu_grid=(best[0],), gamma_grid=(best[1],))


def smote(
    training: np.ndarray, ratio: float, k: int = 5, seed: int = 0
) -> np.ndarray:
    """Append round(ratio * n) synthetic points interpolated toward neighbors.

    Each synthetic point is x + g * (nn - x) for a uniformly drawn g in (0, 1)
    and nn one of the k Euclidean nearest neighbors of x. Deterministic for a
    fixed seed. Requires more than k training points.
    """
    matrix = np.asarray(training, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("training data must be a 2-D matrix")
    if ratio < 0.0:
        raise ValueError("ratio must be nonnegative")
    n = matrix.shape[0]
    if n <= k:
        raise ValueError(f"SMOTE with k={k} needs more than {k} samples, got {n}")
    n_synth = int(round(ratio * n))
    if n_synth == 0:
        return matrix.copy()
    rng = np.random.default_rng(seed)
    diff = matrix[:, None, :] - matrix[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    # argsort is stable, so equidistant neighbors resolve by index order
    neighbor_ids = np.argsort(dist, axis=1, kind="stable")[:, :k]
    synth = np.empty((n_synth, matrix.shape[1]), dtype=float)
    for i in range(n_synth):
        base = int(rng.integers(0, n))
        neighbor = matrix[neighbor_ids[base][int(rng.integers(0, k))]]
        g = float(rng.uniform(0.0, 1.0))
        while g == 0.0:  # interpolation coefficient must be strictly inside (0, 1)
            g = float(rng.uniform(0.0, 1.0))
        synth[i] = matrix[base] + g * (neighbor - matrix[base])
    return np.vstack([matrix, synth])
