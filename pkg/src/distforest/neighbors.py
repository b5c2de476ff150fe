"""Forest weights read as patient similarity: nearest cohort neighbors,
weighted neighborhood profiles, and patient-vs-neighborhood divergence.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, FEATURE_NAMES, feature_index
from .evaluation import CrpsReport
from .forest import WeightVector

#: Quantities a neighborhood profile averages (feature columns plus the
#: response itself).
PROFILE_QUANTITIES = ("odx_score", "age", "tumor_size", "p53", "er", "pr", "ki67")

#: Quantities tracked by default in divergence reports.
DEFAULT_DIVERGENCE_QUANTITIES = ("odx_score", "ki67", "p53")


@dataclass(frozen=True)
class NeighborEntry:
    rank: int
    row_id: str
    row_index: int
    weight: float
    features: dict[str, float]
    odx_score: float


@dataclass
class NeighborList:
    entries: list[NeighborEntry]
    query: np.ndarray
    k: int


@dataclass(frozen=True)
class NeighborhoodProfile:
    weighted_means: dict[str, float]


@dataclass(frozen=True)
class DivergenceRow:
    row_id: str
    row_index: int
    misclassified: bool
    abs_diff: dict[str, float]


@dataclass
class DivergenceReport:
    rows: list[DivergenceRow] = field(default_factory=list)
    quantities: tuple[str, ...] = DEFAULT_DIVERGENCE_QUANTITIES

    def group_means(self) -> dict[str, dict[str, float | None]]:
        """Mean absolute difference per quantity, split by classification
        outcome; recomputed from the per-row values."""
        out: dict[str, dict[str, float | None]] = {}
        for q in self.quantities:
            correct = [r.abs_diff[q] for r in self.rows if not r.misclassified]
            wrong = [r.abs_diff[q] for r in self.rows if r.misclassified]
            out[q] = {
                "correct": float(np.mean(correct)) if correct else None,
                "misclassified": float(np.mean(wrong)) if wrong else None,
            }
        return out


def _quantity_values(data: Dataset, indices: np.ndarray, quantity: str) -> np.ndarray:
    if quantity == "odx_score":
        return data.responses[indices]
    return data.features[indices, feature_index(quantity)]


def top_neighbors(weights: WeightVector, data: Dataset, k: int) -> NeighborList:
    """The k largest-weight training rows, ties broken by lower row index.

    Zero-weight rows never appear; fewer than k positive weights yield a
    shorter list.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(weights.weights.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    entries = [
        NeighborEntry(
            rank=r + 1,
            row_id=data.ids[i],
            row_index=i,
            weight=w,
            features={name: float(data.features[i, j]) for j, name in enumerate(FEATURE_NAMES)},
            odx_score=float(data.responses[i]),
        )
        for r, (i, w) in enumerate(ranked)
    ]
    return NeighborList(entries=entries, query=weights.query, k=k)


def neighborhood_profile(weights: WeightVector, data: Dataset) -> NeighborhoodProfile:
    """Weighted averages over the full weight support (not just the top k)."""
    if not weights.weights:
        raise ValueError("empty weight support")
    indices = np.array(sorted(weights.weights), dtype=np.intp)
    mass = np.array([weights.weights[int(i)] for i in indices])
    means = {
        q: float(np.dot(mass, _quantity_values(data, indices, q)))
        for q in PROFILE_QUANTITIES
    }
    return NeighborhoodProfile(weighted_means=means)


def divergence_analysis(
    oob_report: CrpsReport,
    oob_weights: list[WeightVector],
    data: Dataset,
    quantities: tuple[str, ...] = DEFAULT_DIVERGENCE_QUANTITIES,
) -> DivergenceReport:
    """Absolute difference between each evaluated patient and their weighted
    neighborhood mean, aggregated by classification outcome."""
    report = DivergenceReport(quantities=quantities)
    for row in oob_report.rows:
        wv = oob_weights[row.row_index]
        if wv.is_empty:
            continue
        profile = neighborhood_profile(wv, data)
        diffs = {}
        for q in quantities:
            patient = float(_quantity_values(data, np.array([row.row_index]), q)[0])
            diffs[q] = abs(patient - profile.weighted_means[q])
        report.rows.append(
            DivergenceRow(
                row_id=row.row_id,
                row_index=row.row_index,
                misclassified=row.misclassified,
                abs_diff=diffs,
            )
        )
    return report
