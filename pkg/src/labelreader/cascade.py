"""Boosted-stump cascade for text/non-text classification.

Each stage is a small AdaBoost ensemble of decision stumps whose acceptance
threshold is lowered just enough to keep nearly all positives; negatives that
a stage rejects are dropped from the pool before the next stage trains, so
later stages concentrate on the hard false positives. Inference walks the
stages in order and rejects at the first failure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError, ModelFormatError, ParameterError

log = logging.getLogger(__name__)

_EPS_CLAMP = 1e-10


@dataclass
class WeakLearner:
    feature_index: int
    threshold: float
    polarity: int  # +1: positive iff value > threshold; -1: positive iff value < threshold
    alpha: float


@dataclass
class CascadeStage:
    learners: list[WeakLearner]
    threshold: float  # sample passes iff sum(alpha * vote) >= threshold


@dataclass
class CascadeClassifier:
    stages: list[CascadeStage]
    feature_length: int


@dataclass
class TrainConfig:
    min_detection: float = 0.995  # per-stage detection-rate target on positives
    max_false_positive: float = 0.5  # per-stage false-positive target on negatives
    global_false_positive: float = 1e-3
    max_stages: int = 10
    max_learners_per_stage: int = 50

    def validate(self) -> None:
        if not 0.0 < self.min_detection <= 1.0:
            raise ParameterError(f"min_detection must be in (0, 1], got {self.min_detection}")
        if not 0.0 < self.max_false_positive < 1.0:
            raise ParameterError(
                f"max_false_positive must be in (0, 1), got {self.max_false_positive}"
            )
        if not 0.0 < self.global_false_positive < 1.0:
            raise ParameterError("global_false_positive must be in (0, 1)")
        if self.max_stages < 1:
            raise ParameterError("max_stages must be >= 1")
        if self.max_learners_per_stage < 1:
            raise ParameterError("max_learners_per_stage must be >= 1")


def _as_samples(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D (n, features) array, got shape {a.shape}")
    return a


def train_stump(samples: np.ndarray, labels: np.ndarray, weights: np.ndarray) -> WeakLearner:
    """Exhaustive best decision stump under the given sample weights.

    Thresholds are midpoints between consecutive distinct sorted feature
    values; both polarities are tried. Ties resolve to the lowest feature
    index, then the lowest threshold, then polarity +1. The vote weight is
    alpha = 0.5 ln((1-e)/e) with the weighted error e clamped away from 0/1.
    """
    x = _as_samples(samples, "samples")
    y = np.asarray(labels, dtype=np.int64)
    w = np.asarray(weights, dtype=np.float64)
    if y.shape != (x.shape[0],) or w.shape != (x.shape[0],):
        raise DimensionError("labels and weights must align with samples")
    if not np.isin(y, (-1, 1)).all():
        raise ParameterError("labels must be +1 or -1")
    if abs(w.sum() - 1.0) > 1e-6:
        raise ParameterError("weights must sum to 1")
    if (y > 0).sum() == 0 or (y < 0).sum() == 0:
        raise DegenerateInputError("stump training needs both classes present")

    best: tuple[float, int, float, int] | None = None  # (error, feature, threshold, pol_rank)
    for j in range(x.shape[1]):
        xs = x[:, j]
        order = np.argsort(xs, kind="stable")
        xss = xs[order]
        wpos = np.cumsum(w[order] * (y[order] > 0))
        wneg = np.cumsum(w[order] * (y[order] < 0))
        total_pos = wpos[-1]
        total_neg = wneg[-1]
        split = np.nonzero(xss[1:] != xss[:-1])[0]
        if split.size == 0:
            continue
        thresholds = (xss[split] + xss[split + 1]) / 2.0
        # polarity +1 predicts positive for values above the threshold
        err_plus = wpos[split] + (total_neg - wneg[split])
        err_minus = (total_pos - wpos[split]) + wneg[split]
        for pol_rank, errs in enumerate((err_plus, err_minus)):
            i = int(np.argmin(errs))  # first minimum = lowest threshold
            cand = (float(errs[i]), j, float(thresholds[i]), pol_rank)
            if best is None or cand < best:
                best = cand
    if best is None:
        raise DegenerateInputError("all feature columns are constant; no stump exists")
    err, feature, threshold, pol_rank = best
    eps = min(max(err, _EPS_CLAMP), 1.0 - _EPS_CLAMP)
    alpha = 0.5 * math.log((1.0 - eps) / eps)
    return WeakLearner(
        feature_index=feature,
        threshold=threshold,
        polarity=1 if pol_rank == 0 else -1,
        alpha=alpha,
    )


def stump_predict(learner: WeakLearner, samples: np.ndarray) -> np.ndarray:
    x = _as_samples(samples, "samples")
    values = x[:, learner.feature_index]
    return np.where(learner.polarity * (values - learner.threshold) > 0, 1.0, -1.0)


def stage_scores(stage: CascadeStage, samples: np.ndarray) -> np.ndarray:
    x = _as_samples(samples, "samples")
    scores = np.zeros(x.shape[0], dtype=np.float64)
    for lr in stage.learners:
        scores += lr.alpha * stump_predict(lr, x)
    return scores


def train_stage(
    positives: np.ndarray,
    negatives: np.ndarray,
    config: TrainConfig | None = None,
    on_round=None,
) -> CascadeStage:
    """AdaBoost one stage until its false-positive target is met.

    After every round the acceptance threshold is set to the highest value
    that still keeps at least ``min_detection`` of the training positives;
    rounds stop once the false-positive rate on the negatives drops to
    ``max_false_positive`` or the learner budget runs out. ``on_round``
    (round_index, weights) is called after each reweighting, for diagnostics.
    """
    cfg = config or TrainConfig()
    cfg.validate()
    pos = _as_samples(positives, "positives")
    neg = _as_samples(negatives, "negatives")
    if len(pos) == 0 or len(neg) == 0:
        raise ParameterError("stage training needs non-empty positives and negatives")
    if pos.shape[1] != neg.shape[1]:
        raise DimensionError("positives and negatives must share feature length")

    n_pos, n_neg = len(pos), len(neg)
    x = np.vstack([pos, neg])
    y = np.concatenate([np.ones(n_pos, dtype=np.int64), -np.ones(n_neg, dtype=np.int64)])
    w = np.full(n_pos + n_neg, 1.0 / (n_pos + n_neg), dtype=np.float64)

    learners: list[WeakLearner] = []
    agg = np.zeros(n_pos + n_neg, dtype=np.float64)
    threshold = 0.0
    k = math.ceil(cfg.min_detection * n_pos)
    for _ in range(cfg.max_learners_per_stage):
        lr = train_stump(x, y, w)
        if lr.alpha <= 0.0:
            break  # no stump beats chance on these weights
        learners.append(lr)
        votes = stump_predict(lr, x)
        w = w * np.exp(-lr.alpha * y * votes)
        w /= w.sum()
        if on_round is not None:
            on_round(len(learners), w)
        agg += lr.alpha * votes
        threshold = float(np.sort(agg[:n_pos])[n_pos - k])
        fp = float((agg[n_pos:] >= threshold).mean())
        if fp <= cfg.max_false_positive:
            break
    if not learners:
        raise DegenerateInputError("no usable stump found; stage training cannot start")
    return CascadeStage(learners=learners, threshold=threshold)


def train_cascade(
    positives: np.ndarray, negatives: np.ndarray, config: TrainConfig | None = None
) -> CascadeClassifier:
    """Stack stages, bootstrapping each on the surviving false positives."""
    cfg = config or TrainConfig()
    cfg.validate()
    pos = _as_samples(positives, "positives")
    neg = _as_samples(negatives, "negatives")
    if len(pos) == 0 or len(neg) == 0:
        raise ParameterError("cascade training needs non-empty positives and negatives")
    if pos.shape[1] != neg.shape[1]:
        raise DimensionError("positives and negatives must share feature length")

    pool = neg
    n0 = len(neg)
    stages: list[CascadeStage] = []
    while len(stages) < cfg.max_stages:
        stage = train_stage(pos, pool, cfg)
        stages.append(stage)
        pool = pool[stage_scores(stage, pool) >= stage.threshold]
        cumulative_fp = len(pool) / n0
        log.info(
            "stage %d: %d learners, %d/%d negatives still pass (%.4f)",
            len(stages),
            len(stage.learners),
            len(pool),
            n0,
            cumulative_fp,
        )
        if len(pool) == 0 or cumulative_fp <= cfg.global_false_positive:
            break
    return CascadeClassifier(stages=stages, feature_length=pos.shape[1])


def classify(clf: CascadeClassifier, vector: np.ndarray) -> tuple[bool, int | None]:
    """Run the cascade on one vector: (accepted, index of the rejecting stage)."""
    v = np.asarray(vector, dtype=np.float64).ravel()
    if v.shape != (clf.feature_length,):
        raise DimensionError(
            f"vector length {v.shape[0] if v.ndim else 0} != model {clf.feature_length}"
        )
    for i, stage in enumerate(clf.stages):
        score = 0.0
        for lr in stage.learners:
            vote = 1.0 if lr.polarity * (v[lr.feature_index] - lr.threshold) > 0 else -1.0
            score += lr.alpha * vote
        if score < stage.threshold:
            return False, i
    return True, None


def accept_mask(clf: CascadeClassifier, samples: np.ndarray) -> np.ndarray:
    """Vectorized cascade acceptance over many samples."""
    x = _as_samples(samples, "samples")
    if x.shape[1] != clf.feature_length:
        raise DimensionError(f"feature length {x.shape[1]} != model {clf.feature_length}")
    alive = np.ones(len(x), dtype=bool)
    for stage in clf.stages:
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        alive[idx] = stage_scores(stage, x[idx]) >= stage.threshold
    return alive


def save_model(clf: CascadeClassifier, path) -> None:
    """Versioned text format; floats carry 17 significant digits."""
    lines = [f"cascade v1 {clf.feature_length} {len(clf.stages)}"]
    for stage in clf.stages:
        lines.append(f"stage {len(stage.learners)} {stage.threshold:.17g}")
        for lr in stage.learners:
            lines.append(f"{lr.feature_index} {lr.threshold:.17g} {lr.polarity:+d} {lr.alpha:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> CascadeClassifier:
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ModelFormatError(f"{path}: empty model file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "cascade" or header[1] != "v1":
        raise ModelFormatError(f"{path}: bad header {lines[0]!r}")
    try:
        feature_length = int(header[2])
        n_stages = int(header[3])
    except ValueError as exc:
        raise ModelFormatError(f"{path}: non-numeric header fields") from exc
    stages = []
    pos = 1
    for _ in range(n_stages):
        if pos >= len(lines):
            raise ModelFormatError(f"{path}: truncated before stage {len(stages) + 1}")
        parts = lines[pos].split()
        if len(parts) != 3 or parts[0] != "stage":
            raise ModelFormatError(f"{path}: expected stage line, got {lines[pos]!r}")
        try:
            n_learners = int(parts[1])
            threshold = float(parts[2])
        except ValueError as exc:
            raise ModelFormatError(f"{path}: bad stage line {lines[pos]!r}") from exc
        pos += 1
        learners = []
        for _ in range(n_learners):
            if pos >= len(lines):
                raise ModelFormatError(f"{path}: truncated learner list")
            fields = lines[pos].split()
            if len(fields) != 4:
                raise ModelFormatError(f"{path}: bad learner line {lines[pos]!r}")
            try:
                learner = WeakLearner(
                    feature_index=int(fields[0]),
                    threshold=float(fields[1]),
                    polarity=int(fields[2]),
                    alpha=float(fields[3]),
                )
            except ValueError as exc:
                raise ModelFormatError(f"{path}: bad learner line {lines[pos]!r}") from exc
            if learner.polarity not in (-1, 1):
                raise ModelFormatError(f"{path}: polarity must be +1 or -1")
            if learner.feature_index < 0 or learner.feature_index >= feature_length:
                raise ModelFormatError(f"{path}: feature index out of range")
            learners.append(learner)
            pos += 1
        stages.append(CascadeStage(learners=learners, threshold=threshold))
    if pos != len(lines):
        raise ModelFormatError(f"{path}: trailing data after the last stage")
    return CascadeClassifier(stages=stages, feature_length=feature_length)
