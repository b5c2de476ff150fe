"""Wire formats and text reports: the JSON prediction/neighbor documents
served over HTTP and printed by the CLI, plus the evaluation and cohort
summary tables.
"""
from __future__ import annotations

from .cohort import COHORT_MARGINALS, CohortMarginals, band_label
from .data import Dataset, FEATURE_NAMES, FeatureVector
from .distribution import (
    DEFAULT_HISTOGRAM_BINS,
    DEFAULT_RISK_CLASSES,
    DistributionSummary,
    RiskClasses,
    make_distribution,
    summarize,
)
from .evaluation import ConfusionMatrix, CrpsReport, EvaluationResult, MetricsReport
from .forest import Forest, forest_weights
from .model_io import MODEL_FORMAT
from .neighbors import NeighborList, neighborhood_profile, top_neighbors

PREDICTION_SCHEMA = "distforest-prediction/v1"
NEIGHBORS_SCHEMA = "distforest-neighbors/v1"


def summary_to_wire(summary: DistributionSummary) -> dict:
    return {
        "mean": summary.mean,
        "median": summary.median,
        "std_error": summary.std_error,
        "credible_interval_90": list(summary.credible_interval_90),
        "class_probs": dict(summary.class_probs),
        "binary_probs": dict(summary.binary_probs),
    }


def histogram_to_wire(histogram) -> list[dict]:
    return [{"lo": lo, "hi": hi, "mass": mass} for lo, hi, mass in histogram]


def neighbors_to_wire(neighbor_list: NeighborList) -> list[dict]:
    return [
        {
            "rank": e.rank,
            "id": e.row_id,
            "weight": e.weight,
            "features": dict(e.features),
            "odx_score": e.odx_score,
        }
        for e in neighbor_list.entries
    ]


def model_info(forest: Forest) -> dict:
    feature_schema = []
    for name in FEATURE_NAMES:
        if name in ("sbr_grade", "mitotic_grade"):
            feature_schema.append({"name": name, "kind": "ordinal", "values": [1, 2, 3]})
        elif name == "lymph_nodes":
            feature_schema.append(
                {"name": name, "kind": "ordinal", "values": [-1, 0, 1, 2, 3], "na_code": -1}
            )
        elif name in ("p53", "er", "pr", "ki67"):
            feature_schema.append({"name": name, "kind": "percent", "min": 0, "max": 100})
        else:
            feature_schema.append({"name": name, "kind": "positive_real"})
    return {
        "model_version": MODEL_FORMAT,
        "num_trees": forest.config.num_trees,
        "training_rows": forest.num_rows,
        "seed": forest.config.seed,
        "fingerprint": forest.dataset_fingerprint,
        "features": feature_schema,
    }


def prediction_response(
    forest: Forest,
    data: Dataset,
    fv: FeatureVector,
    k: int = 10,
    bins: int = DEFAULT_HISTOGRAM_BINS,
    classes: RiskClasses = DEFAULT_RISK_CLASSES,
    warnings: list[str] | None = None,
) -> dict:
    """Full prediction document: distribution summary, histogram and the
    nearest cohort neighbors for one query."""
    weights = forest_weights(forest, data, fv)
    dist = make_distribution(weights, data)
    summary = summarize(dist, classes, bins)
    neighbor_list = top_neighbors(weights, data, k)
    return {
        "schema": PREDICTION_SCHEMA,
        "model_version": MODEL_FORMAT,
        "model": {
            "num_trees": forest.config.num_trees,
            "training_rows": forest.num_rows,
            "fingerprint": forest.dataset_fingerprint,
        },
        "summary": summary_to_wire(summary),
        "histogram": histogram_to_wire(summary.histogram),
        "neighbors": neighbors_to_wire(neighbor_list),
        "warnings": list(warnings or []),
    }


def neighbors_response(forest: Forest, data: Dataset, fv: FeatureVector, k: int = 10) -> dict:
    weights = forest_weights(forest, data, fv)
    profile = neighborhood_profile(weights, data)
    return {
        "schema": NEIGHBORS_SCHEMA,
        "k": k,
        "neighbors": neighbors_to_wire(top_neighbors(weights, data, k)),
        "profile": {"weighted_means": dict(profile.weighted_means)},
    }


# --- text reports ------------------------------------------------------------


def _pct(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.1%}"


def _num(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.3f}"


def format_metrics_block(cm: ConfusionMatrix, report: MetricsReport) -> str:
    lines = [
        "Confusion matrix (positive = ODX <= 25)",
        "                     predicted <=25   predicted >25",
        f"  true ODX <= 25     {cm.tp:>14d}   {cm.fn:>13d}",
        f"  true ODX > 25      {cm.fp:>14d}   {cm.tn:>13d}",
        "",
        f"  Accuracy                    {_pct(report.accuracy)}",
        f"  Sensitivity                 {_pct(report.sensitivity)}",
        f"  Specificity                 {_pct(report.specificity)}",
        f"  Positive Predictive Value   {_pct(report.ppv)}",
        f"  Negative Predictive Value   {_pct(report.npv)}",
        f"  F1-score                    {_num(report.f1)}",
        f"  Area Under Curve            {_num(report.auc)}",
    ]
    return "\n".join(lines)


def per_observation_table(report: CrpsReport) -> str:
    lines = ["id\ttrue_score\tcrps\tp_le25\tpredicted\tcorrect"]
    for row in report.rows:
        lines.append(
            "\t".join(
                [
                    row.row_id,
                    f"{row.true_score:.6g}",
                    f"{row.crps:.6g}",
                    f"{row.prob_le25:.6g}",
                    "<=25" if row.predicted_le25 else ">25",
                    "no" if row.misclassified else "yes",
                ]
            )
        )
    return "\n".join(lines)


def crps_triage(report: CrpsReport) -> str:
    """Best / median / worst rows by CRPS, for quick forecast triage."""
    order = report.sorted_view
    if not order:
        return "no scored observations"

    def describe(label: str, idx: int) -> str:
        row = report.rows[idx]
        return (
            f"  {label:<7} id={row.row_id}  crps={row.crps:.3f}  "
            f"true={row.true_score:.6g}  P(<=25)={row.prob_le25:.3f}"
        )

    lines = ["CRPS triage (lower = sharper forecast)"]
    lines.append(describe("best", order[0]))
    lines.append(describe("median", order[len(order) // 2]))
    lines.append(describe("worst", order[-1]))
    return "\n".join(lines)


def format_evaluation(result: EvaluationResult) -> str:
    parts = [format_metrics_block(result.confusion, result.metrics)]
    parts.append("")
    parts.append(f"Mean CRPS: {result.report.mean_crps:.4f} over {len(result.report.rows)} observations")
    if result.excluded_ids:
        parts.append(f"Excluded (no out-of-bag trees): {', '.join(result.excluded_ids)}")
    parts.append("")
    parts.append(crps_triage(result.report))
    return "\n".join(parts)


def format_cohort_table(
    data: Dataset,
    marginals: CohortMarginals = COHORT_MARGINALS,
    classes: RiskClasses = DEFAULT_RISK_CLASSES,
) -> str:
    """Band frequencies cross-tabulated against the three response bands,
    as percentages of the whole cohort."""
    bands = [classes.band(v) for v in data.responses]
    n = data.n
    col_names = ("low", "intermediate", "high")
    lines = [
        f"{'feature':<14} {'band':<10} {'<16':>7} {'16-25':>7} {'>25':>7} {'total':>7}",
        f"{'population':<14} {'':<10} "
        + " ".join(f"{100.0 * bands.count(c) / n:>7.2f}" for c in col_names)
        + f" {100.0:>7.2f}",
    ]
    for j, name in enumerate(FEATURE_NAMES):
        table_bands = marginals.tables[name]
        for band in table_bands:
            in_band = [band_label(marginals, name, v) == band.label for v in data.features[:, j]]
            counts = {c: 0 for c in col_names}
            for flag, response_band in zip(in_band, bands):
                if flag:
                    counts[response_band] += 1
            total = sum(counts.values())
            lines.append(
                f"{name:<14} {band.label:<10} "
                + " ".join(f"{100.0 * counts[c] / n:>7.2f}" for c in col_names)
                + f" {100.0 * total / n:>7.2f}"
            )
    return "\n".join(lines)
