"""Predictive distributions: the weighted empirical law of the response.

A weight vector plus the training responses defines a discrete distribution
(atoms at observed ODX scores). Everything downstream - point estimates,
uncertainty, risk-class probabilities, histograms - reads off this measure;
no smoothing is applied.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, ODX_MAX, ODX_MIN
from .forest import Forest, WeightVector, forest_weights


@dataclass(frozen=True)
class PredictiveDistribution:
    """Weighted empirical distribution: strictly increasing atom values with
    merged masses summing to one."""

    values: np.ndarray
    weights: np.ndarray
    source_mode: str = "all_trees"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if values.ndim != 1 or values.shape != weights.shape or values.size == 0:
            raise ValueError("atoms must be matching non-empty 1-d arrays")
        if np.any(np.diff(values) <= 0):
            raise ValueError("atom values must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("atom weights must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(v), float(w)) for v, w in zip(self.values, self.weights)]


@dataclass(frozen=True)
class RiskClasses:
    """ODX risk bands: low < low_cut, intermediate in [low_cut, high_cut],
    high > high_cut; the binary split is at high_cut (boundary inclusive)."""

    low_cut: float = 16.0
    high_cut: float = 25.0

    def __post_init__(self):
        if not self.low_cut < self.high_cut:
            raise ValueError("low_cut must be below high_cut")

    def band(self, score: float) -> str:
        if score < self.low_cut:
            return "low"
        if score <= self.high_cut:
            return "intermediate"
        return "high"


DEFAULT_RISK_CLASSES = RiskClasses()
DEFAULT_HISTOGRAM_BINS = 20


@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    median: float
    std_error: float
    credible_interval_90: tuple[float, float]
    class_probs: dict[str, float]
    binary_probs: dict[str, float]
    histogram: list[tuple[float, float, float]]


def make_distribution(weights: WeightVector, data: Dataset) -> PredictiveDistribution:
    """Turn a weight vector into the weighted empirical response distribution;
    atoms with equal response values are merged."""
    if not weights.weights:
        raise ValueError("empty weight support")
    support = np.array(sorted(weights.weights), dtype=np.intp)
    mass = np.array([weights.weights[int(i)] for i in support])
    values = data.responses[support]
    uniq, inverse = np.unique(values, return_inverse=True)
    merged = np.bincount(inverse, weights=mass, minlength=uniq.size)
    return PredictiveDistribution(values=uniq, weights=merged, source_mode=weights.mode)


def predict_distribution(forest: Forest, data: Dataset, x, excluded_index: int | None = None) -> PredictiveDistribution:
    return make_distribution(forest_weights(forest, data, x, excluded_index), data)


def marginal_distribution(data: Dataset) -> PredictiveDistribution:
    """Climatological forecast: the training responses weighted uniformly,
    independent of any query. Serves as the no-skill baseline."""
    uniq, inverse = np.unique(data.responses, return_inverse=True)
    merged = np.bincount(inverse, minlength=uniq.size) / data.n
    return PredictiveDistribution(values=uniq, weights=merged, source_mode="marginal")


def cdf(dist: PredictiveDistribution, y: float) -> float:
    """Right-continuous step CDF: total mass of atoms with value <= y."""
    return float(dist.weights[dist.values <= y].sum())


def quantile(dist: PredictiveDistribution, p: float) -> float:
    """Generalized inverse: smallest atom value v with cdf(v) >= p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("quantile level must be in [0, 1]")
    cum = np.cumsum(dist.weights)
    idx = int(np.searchsorted(cum, p, side="left"))
    idx = min(idx, dist.values.size - 1)
    return float(dist.values[idx])


def class_masses(dist: PredictiveDistribution, classes: RiskClasses = DEFAULT_RISK_CLASSES) -> dict[str, float]:
    """Partition the distribution mass into the three risk bands.

    The band boundaries follow RiskClasses: a score exactly at low_cut is
    intermediate, exactly at high_cut is still in the <=high_cut class.
    """
    low = float(dist.weights[dist.values < classes.low_cut].sum())
    mid_mask = (dist.values >= classes.low_cut) & (dist.values <= classes.high_cut)
    intermediate = float(dist.weights[mid_mask].sum())
    high = float(dist.weights[dist.values > classes.high_cut].sum())
    return {"low": low, "intermediate": intermediate, "high": high}


def histogram(dist: PredictiveDistribution, bins: int = DEFAULT_HISTOGRAM_BINS) -> list[tuple[float, float, float]]:
    """Accumulate atom masses into equal-width bins over [0, 100].

    A value on a bin boundary belongs to the lower bin, except 0 which stays
    in bin 0 (bins are (lo, hi] apart from the first, which is [0, hi]).
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    width = (ODX_MAX - ODX_MIN) / bins
    idx = np.ceil((dist.values - ODX_MIN) / width).astype(int) - 1
    idx = np.clip(idx, 0, bins - 1)
    mass = np.zeros(bins)
    np.add.at(mass, idx, dist.weights)
    return [
        (ODX_MIN + k * width, ODX_MIN + (k + 1) * width, float(mass[k]))
        for k in range(bins)
    ]


def summarize(
    dist: PredictiveDistribution,
    classes: RiskClasses = DEFAULT_RISK_CLASSES,
    bins: int = DEFAULT_HISTOGRAM_BINS,
) -> DistributionSummary:
    """Point estimates, uncertainty, class probabilities and histogram.

    std_error is the standard deviation of the predictive distribution; the
    90% interval spans its 0.05 and 0.95 generalized-inverse quantiles.
    """
    mean = float(np.dot(dist.weights, dist.values))
    std_error = float(np.sqrt(np.dot(dist.weights, (dist.values - mean) ** 2)))
    class_probs = class_masses(dist, classes)
    binary_probs = {
        "le25": class_probs["low"] + class_probs["intermediate"],
        "gt25": class_probs["high"],
    }
    return DistributionSummary(
        mean=mean,
        median=quantile(dist, 0.5),
        std_error=std_error,
        credible_interval_90=(quantile(dist, 0.05), quantile(dist, 0.95)),
        class_probs=class_probs,
        binary_probs=binary_probs,
        histogram=histogram(dist, bins),
    )
