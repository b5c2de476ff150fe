"""Probabilistic and classification evaluation: CRPS scoring with an exact
integral cross-check, out-of-bag and K-fold validation harnesses, and the
standard confusion-matrix metric battery.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset
from .distribution import (
    DEFAULT_RISK_CLASSES,
    PredictiveDistribution,
    RiskClasses,
    cdf,
    class_masses,
    make_distribution,
)
from .forest import Forest, ForestConfig, WeightVector, fit_forest, forest_weights, oob_weights_all


class OobUnavailableError(RuntimeError):
    """No training row has any out-of-bag tree (e.g. resample fraction 1.0)."""

    def __init__(self, row_ids):
        self.row_ids = list(row_ids)
        super().__init__(
            "no out-of-bag predictions available: every row is in-bag for all trees"
        )


def crps(dist: PredictiveDistribution, y: float) -> float:
    """Continuous ranked probability score of a discrete forecast against an
    observed value, in response units.

    Computed via the weighted closed form
    sum_i w_i |y_i - y| - sum_{i<j} w_i w_j |y_i - y_j|; for a point-mass
    forecast this reduces exactly to the absolute error.
    """
    term1 = float(np.dot(dist.weights, np.abs(dist.values - y)))
    cum = np.cumsum(dist.weights)
    mass_below = cum - dist.weights
    mass_above = cum[-1] - cum
    wv = dist.weights * dist.values
    term2 = float(np.dot(wv, mass_below - mass_above))
    return term1 - term2


def crps_integral_oracle(dist: PredictiveDistribution, y: float, grid_step: float = 1e-3) -> float:
    """Independent CRPS evaluation from the defining integral of
    (F(z) - 1{y <= z})^2.

    The integrand is piecewise constant between the atom values and y, so the
    integral is summed exactly over that partition; grid_step is validated
    for interface compatibility but cannot affect the exact result.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    breaks = np.unique(np.append(dist.values, y))
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        f = cdf(dist, lo)
        indicator = 1.0 if y <= lo else 0.0
        total += (f - indicator) ** 2 * (hi - lo)
    return total


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary counts with positive = true score <= high cut (low/intermediate)."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    """Standard classification metrics; None marks an undefined ratio (zero
    denominator) rather than a silent 0."""

    accuracy: float | None
    sensitivity: float | None
    specificity: float | None
    ppv: float | None
    npv: float | None
    f1: float | None
    auc: float | None = None


def _ratio(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


def metrics(cm: ConfusionMatrix, auc: float | None = None) -> MetricsReport:
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    sensitivity = _ratio(cm.tp, cm.tp + cm.fn)
    ppv = _ratio(cm.tp, cm.tp + cm.fp)
    if ppv is not None and sensitivity is not None and (ppv + sensitivity) > 0:
        f1 = 2 * ppv * sensitivity / (ppv + sensitivity)
    else:
        f1 = None
    return MetricsReport(
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        sensitivity=sensitivity,
        specificity=_ratio(cm.tn, cm.fp + cm.tn),
        ppv=ppv,
        npv=_ratio(cm.tn, cm.fn + cm.tn),
        f1=f1,
        auc=auc,
    )


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score of a positive > score of a negative), ties
    counted half. Invariant under strictly increasing score transforms."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be matching 1-d sequences")
    pos = scores[labels]
    neg = np.sort(scores[~labels])
    if pos.size == 0 or neg.size == 0:
        raise ValueError("roc_auc requires both classes to be present")
    below = np.searchsorted(neg, pos, side="left")
    ties = np.searchsorted(neg, pos, side="right") - below
    return float((below.sum() + 0.5 * ties.sum()) / (pos.size * neg.size))


@dataclass(frozen=True)
class CrpsRow:
    row_id: str
    row_index: int
    true_score: float
    crps: float
    prob_le25: float
    predicted_le25: bool
    misclassified: bool


@dataclass
class CrpsReport:
    rows: list[CrpsRow] = field(default_factory=list)

    @property
    def sorted_view(self) -> list[int]:
        """Indices into rows ordered by CRPS ascending (sharpest first)."""
        return sorted(range(len(self.rows)), key=lambda i: (self.rows[i].crps, self.rows[i].row_index))

    @property
    def mean_crps(self) -> float:
        return float(np.mean([r.crps for r in self.rows]))


@dataclass
class EvaluationResult:
    report: CrpsReport
    confusion: ConfusionMatrix
    metrics: MetricsReport
    excluded_ids: list[str] = field(default_factory=list)


def _score_rows(
    row_indices,
    distributions,
    data: Dataset,
    classes: RiskClasses,
    threshold: float,
) -> EvaluationResult:
    report = CrpsReport()
    tp = fp = fn = tn = 0
    auc_scores: list[float] = []
    auc_labels: list[bool] = []
    for i, dist in zip(row_indices, distributions):
        y = float(data.responses[i])
        masses = class_masses(dist, classes)
        p_le = masses["low"] + masses["intermediate"]
        predicted_le = p_le >= threshold
        true_le = y <= classes.high_cut
        if true_le and predicted_le:
            tp += 1
        elif true_le:
            fn += 1
        elif predicted_le:
            fp += 1
        else:
            tn += 1
        report.rows.append(
            CrpsRow(
                row_id=data.ids[i],
                row_index=int(i),
                true_score=y,
                crps=crps(dist, y),
                prob_le25=p_le,
                predicted_le25=bool(predicted_le),
                misclassified=bool(predicted_le != true_le),
            )
        )
        auc_scores.append(masses["high"])
        auc_labels.append(not true_le)
    cm = ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)
    try:
        auc = roc_auc(auc_scores, auc_labels)
    except ValueError:
        auc = None
    return EvaluationResult(report=report, confusion=cm, metrics=metrics(cm, auc=auc))


def oob_evaluate(
    forest: Forest,
    data: Dataset,
    classes: RiskClasses = DEFAULT_RISK_CLASSES,
    threshold: float = 0.5,
    weights: list[WeightVector] | None = None,
) -> EvaluationResult:
    """Score every training row against its out-of-bag predictive distribution.

    Each row is classified <=25 iff its out-of-bag P(Y <= high_cut) reaches
    the threshold; AUC uses P(Y > high_cut) as the score for the high label.
    Rows with no out-of-bag tree are excluded and reported by id; if that is
    every row, OobUnavailableError is raised.
    """
    if weights is None:
        weights = oob_weights_all(forest, data)
    evaluable = [i for i, wv in enumerate(weights) if not wv.is_empty]
    excluded = [data.ids[i] for i, wv in enumerate(weights) if wv.is_empty]
    if not evaluable:
        raise OobUnavailableError(excluded)
    distributions = (make_distribution(weights[i], data) for i in evaluable)
    result = _score_rows(evaluable, distributions, data, classes, threshold)
    result.excluded_ids = excluded
    return result


@dataclass(frozen=True)
class CvConfig:
    k: int
    seed: int = 0
    stratify_binary: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")


@dataclass
class FoldResult:
    fold_index: int
    test_rows: np.ndarray
    report: CrpsReport
    confusion: ConfusionMatrix
    metrics: MetricsReport


@dataclass
class CvResult:
    folds: list[FoldResult]
    pooled: EvaluationResult
    fold_mean_crps: list[float]

    @property
    def cv_mean_crps(self) -> float:
        """Per-fold mean CRPS values averaged across folds."""
        return float(np.mean(self.fold_mean_crps))


def kfold_assignments(data: Dataset, cv: CvConfig, classes: RiskClasses = DEFAULT_RISK_CLASSES) -> np.ndarray:
    """Fold index per row: seeded shuffle then round-robin assignment.

    With stratification the two binary classes are shuffled separately and
    dealt through one continuing round-robin, so fold sizes still differ by
    at most one while each fold's class counts differ by at most one.
    """
    if cv.k > data.n:
        raise ValueError("k exceeds cohort size")
    rng = np.random.default_rng([cv.seed & 0xFFFFFFFFFFFFFFFF, 0x6B666F6C])
    if cv.stratify_binary:
        le_mask = data.responses <= classes.high_cut
        groups = [np.nonzero(le_mask)[0], np.nonzero(~le_mask)[0]]
        order = np.concatenate([rng.permutation(g) if g.size else g for g in groups])
    else:
        order = rng.permutation(data.n)
    folds = np.empty(data.n, dtype=np.intp)
    folds[order] = np.arange(data.n) % cv.k
    return folds


def kfold_cv(
    data: Dataset,
    config: ForestConfig,
    cv: CvConfig,
    classes: RiskClasses = DEFAULT_RISK_CLASSES,
    threshold: float = 0.5,
) -> CvResult:
    """K-fold cross validation: each fold is predicted by a forest trained on
    the remaining folds, then scored like the out-of-bag harness."""
    assignments = kfold_assignments(data, cv, classes)
    folds: list[FoldResult] = []
    all_rows: list[int] = []
    all_dists: list[PredictiveDistribution] = []
    for f in range(cv.k):
        test_rows = np.nonzero(assignments == f)[0]
        train_rows = np.nonzero(assignments != f)[0]
        train_data = data.subset(train_rows)
        fold_seed = (config.seed * 1_000_003 + f + 1) & 0x7FFFFFFFFFFFFFFF
        forest = fit_forest(train_data, replace(config, seed=fold_seed))
        dists = [
            make_distribution(forest_weights(forest, train_data, data.features[i]), train_data)
            for i in test_rows
        ]
        fold_eval = _score_rows(test_rows, dists, data, classes, threshold)
        folds.append(
            FoldResult(
                fold_index=f,
                test_rows=test_rows,
                report=fold_eval.report,
                confusion=fold_eval.confusion,
                metrics=fold_eval.metrics,
            )
        )
        all_rows.extend(int(i) for i in test_rows)
        all_dists.extend(dists)
    pool_order = np.argsort(all_rows, kind="stable")
    pooled = _score_rows(
        [all_rows[int(j)] for j in pool_order],
        [all_dists[int(j)] for j in pool_order],
        data,
        classes,
        threshold,
    )
    return CvResult(
        folds=folds,
        pooled=pooled,
        fold_mean_crps=[fold.report.mean_crps for fold in folds],
    )
