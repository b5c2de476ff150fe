import numpy as np
import pytest

from distforest import (
    divergence_analysis,
    forest_weights,
    neighborhood_profile,
    oob_evaluate,
    oob_weights_all,
    predict_mean,
    top_neighbors,
)
from distforest.forest import WeightVector

from conftest import random_query, toy_dataset


def wv(weights):
    return WeightVector(weights=weights, query=np.zeros(9), num_qualifying_trees=1)


def test_top_neighbors_ranked_by_weight():
    data = toy_dataset([1, 2, 3], [5, 10, 15])
    result = top_neighbors(wv({0: 0.5, 1: 0.3, 2: 0.2}), data, k=2)
    assert [(e.row_index, e.weight) for e in result.entries] == [(0, 0.5), (1, 0.3)]
    assert [e.rank for e in result.entries] == [1, 2]


def test_top_neighbors_k_larger_than_support():
    data = toy_dataset([1, 2, 3], [5, 10, 15])
    result = top_neighbors(wv({0: 0.7, 2: 0.3}), data, k=10)
    assert [e.row_index for e in result.entries] == [0, 2]


def test_top_neighbors_tie_breaks_by_lower_index():
    data = toy_dataset([1, 2, 3, 4], [5, 10, 15, 20])
    result = top_neighbors(wv({0: 0.5, 3: 0.5}), data, k=1)
    assert [e.row_index for e in result.entries] == [0]


def test_top_neighbors_never_includes_zero_weight():
    data = toy_dataset([1, 2, 3], [5, 10, 15])
    result = top_neighbors(wv({1: 1.0}), data, k=3)
    assert [e.row_index for e in result.entries] == [1]


def test_top_neighbors_rejects_bad_k():
    data = toy_dataset([1], [5])
    with pytest.raises(ValueError):
        top_neighbors(wv({0: 1.0}), data, k=0)


def test_neighbor_entries_carry_feature_snapshot():
    data = toy_dataset([1.5, 2.5], [5, 10])
    entry = top_neighbors(wv({1: 1.0}), data, k=1).entries[0]
    assert entry.features["age"] == 2.5
    assert entry.odx_score == 10.0
    assert entry.row_id == data.ids[1]


def test_profile_weighted_mean_example():
    data = toy_dataset([1, 2], [10, 30])
    profile = neighborhood_profile(wv({0: 0.5, 1: 0.5}), data)
    assert profile.weighted_means["odx_score"] == 20.0


def test_profile_point_mass_equals_row_values():
    data = toy_dataset([1, 2, 3], [10, 20, 30])
    profile = neighborhood_profile(wv({2: 1.0}), data)
    assert profile.weighted_means["odx_score"] == 30.0
    assert profile.weighted_means["age"] == 3.0


def test_profile_mean_equals_forest_prediction(small_forest, small_cohort):
    rng = np.random.default_rng(44)
    for _ in range(10):
        x = random_query(rng)
        w = forest_weights(small_forest, small_cohort, x)
        profile = neighborhood_profile(w, small_cohort)
        assert abs(profile.weighted_means["odx_score"] - predict_mean(small_forest, small_cohort, x)) <= 1e-10


def test_top_neighbors_is_prefix_of_sorted_support(small_forest, small_cohort):
    w = forest_weights(small_forest, small_cohort, random_query(np.random.default_rng(13)))
    full = top_neighbors(w, small_cohort, k=len(w.weights))
    short = top_neighbors(w, small_cohort, k=5)
    assert [e.row_index for e in short.entries] == [e.row_index for e in full.entries[:5]]
    weights = [e.weight for e in full.entries]
    assert weights == sorted(weights, reverse=True)


def test_divergence_arithmetic():
    # patient score 49 vs neighborhood mean 31 -> absolute difference 18
    data = toy_dataset([1, 2, 3], [49, 31, 31])
    from distforest.evaluation import CrpsReport, CrpsRow

    report = CrpsReport(
        rows=[CrpsRow(row_id="R0", row_index=0, true_score=49.0, crps=5.0, prob_le25=0.5, predicted_le25=True, misclassified=True)]
    )
    weights = [wv({1: 0.5, 2: 0.5}), None, None]
    result = divergence_analysis(report, weights, data)
    assert result.rows[0].abs_diff["odx_score"] == 18.0
    assert result.group_means()["odx_score"]["misclassified"] == 18.0
    assert result.group_means()["odx_score"]["correct"] is None


def test_divergence_zero_for_point_mass_twins():
    data = toy_dataset([1, 2], [15, 40])
    from distforest.evaluation import CrpsReport, CrpsRow

    report = CrpsReport(
        rows=[
            CrpsRow(row_id="R0", row_index=0, true_score=15.0, crps=0.0, prob_le25=1.0, predicted_le25=True, misclassified=False),
            CrpsRow(row_id="R1", row_index=1, true_score=40.0, crps=0.0, prob_le25=0.0, predicted_le25=False, misclassified=False),
        ]
    )
    weights = [wv({0: 1.0}), wv({1: 1.0})]
    result = divergence_analysis(report, weights, data)
    assert all(r.abs_diff[q] == 0.0 for r in result.rows for q in ("odx_score", "ki67", "p53"))


def test_divergence_misclassified_exceed_correct(forest500, cohort333):
    weights = oob_weights_all(forest500, cohort333)
    result = oob_evaluate(forest500, cohort333, weights=weights)
    divergence = divergence_analysis(result.report, weights, cohort333)
    groups = divergence.group_means()["odx_score"]
    assert groups["misclassified"] is not None and groups["correct"] is not None
    assert groups["misclassified"] > groups["correct"]
