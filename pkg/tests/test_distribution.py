import numpy as np
import pytest

from distforest import (
    PredictiveDistribution,
    RiskClasses,
    cdf,
    class_masses,
    forest_weights,
    make_distribution,
    marginal_distribution,
    predict_mean,
    quantile,
    summarize,
)
from distforest.distribution import histogram
from distforest.forest import WeightVector

from conftest import random_query, toy_dataset


def wv(weights):
    return WeightVector(weights=weights, query=np.zeros(9), num_qualifying_trees=1)


def dist_from(atoms):
    values, weights = zip(*atoms)
    return PredictiveDistribution(values=np.array(values, float), weights=np.array(weights, float))


def test_make_distribution_merges_equal_values():
    data = toy_dataset([1, 2], [10, 10])
    dist = make_distribution(wv({0: 0.5, 1: 0.5}), data)
    assert dist.atoms == [(10.0, 1.0)]


def test_make_distribution_sorts_by_value():
    data = toy_dataset([1, 2, 3], [20, 0, 10])
    dist = make_distribution(wv({0: 0.25, 1: 0.5, 2: 0.25}), data)
    assert dist.atoms == [(0.0, 0.5), (10.0, 0.25), (20.0, 0.25)]


def test_make_distribution_total_mass_one(small_forest, small_cohort):
    rng = np.random.default_rng(2)
    for _ in range(20):
        w = forest_weights(small_forest, small_cohort, random_query(rng))
        dist = make_distribution(w, small_cohort)
        assert abs(dist.weights.sum() - 1.0) <= 1e-12


def test_make_distribution_empty_support_raises():
    data = toy_dataset([1], [10])
    with pytest.raises(ValueError, match="empty weight support"):
        make_distribution(WeightVector(weights={}, query=np.zeros(9)), data)


def test_cdf_step_values():
    dist = dist_from([(5, 0.5), (10, 0.5)])
    assert cdf(dist, 4.9) == 0.0
    assert cdf(dist, 5) == 0.5
    assert cdf(dist, 10) == 1.0
    assert cdf(dist, 101) == 1.0
    three = dist_from([(0, 0.5), (10, 0.25), (20, 0.25)])
    assert cdf(three, 10) == 0.75


def test_cdf_monotone_and_bounded(small_forest, small_cohort):
    w = forest_weights(small_forest, small_cohort, random_query(np.random.default_rng(4)))
    dist = make_distribution(w, small_cohort)
    grid = np.linspace(-5, 105, 90)
    values = [cdf(dist, g) for g in grid]
    assert values[0] == 0.0 and abs(values[-1] - 1.0) <= 1e-12
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_quantile_generalized_inverse():
    uniform = dist_from([(1, 0.25), (2, 0.25), (3, 0.25), (4, 0.25)])
    assert quantile(uniform, 0.5) == 2.0
    assert quantile(uniform, 0.0) == 1.0
    assert quantile(uniform, 1.0) == 4.0
    skew = dist_from([(0, 0.5), (10, 0.25), (20, 0.25)])
    assert quantile(skew, 0.9) == 20.0


def test_quantile_cdf_consistency(small_forest, small_cohort):
    w = forest_weights(small_forest, small_cohort, random_query(np.random.default_rng(6)))
    dist = make_distribution(w, small_cohort)
    for p in np.linspace(0, 1, 101):
        assert cdf(dist, quantile(dist, p)) >= p - 1e-12


def test_quantile_rejects_bad_level():
    dist = dist_from([(1, 1.0)])
    with pytest.raises(ValueError):
        quantile(dist, -0.1)
    with pytest.raises(ValueError):
        quantile(dist, 1.1)


def test_summarize_class_probabilities_thirds():
    dist = dist_from([(10, 1 / 3), (20, 1 / 3), (30, 1 / 3)])
    summary = summarize(dist)
    assert summary.class_probs["low"] == pytest.approx(1 / 3)
    assert summary.class_probs["intermediate"] == pytest.approx(1 / 3)
    assert summary.class_probs["high"] == pytest.approx(1 / 3)
    assert summary.binary_probs["le25"] == pytest.approx(2 / 3)
    assert summary.binary_probs["gt25"] == pytest.approx(1 / 3)


def test_summarize_boundary_scores():
    # exactly 25 belongs to the <=25 class; exactly 16 is intermediate
    at_cut = dist_from([(25, 1.0)])
    summary = summarize(at_cut)
    assert summary.binary_probs == {"le25": 1.0, "gt25": 0.0}
    at_low = dist_from([(16, 1.0)])
    assert summarize(at_low).class_probs["intermediate"] == 1.0


def test_summarize_mean_and_std_error():
    dist = dist_from([(0, 0.5), (10, 0.5)])
    summary = summarize(dist)
    assert summary.mean == 5.0
    assert summary.std_error == 5.0


def test_summary_mean_matches_forest_mean(small_forest, small_cohort):
    rng = np.random.default_rng(12)
    for _ in range(10):
        x = random_query(rng)
        w = forest_weights(small_forest, small_cohort, x)
        summary = summarize(make_distribution(w, small_cohort))
        assert abs(summary.mean - predict_mean(small_forest, small_cohort, x)) <= 1e-10


def test_class_and_binary_probs_sum_to_one(small_forest, small_cohort):
    w = forest_weights(small_forest, small_cohort, random_query(np.random.default_rng(3)))
    summary = summarize(make_distribution(w, small_cohort))
    assert abs(sum(summary.class_probs.values()) - 1.0) <= 1e-12
    assert abs(sum(summary.binary_probs.values()) - 1.0) <= 1e-12
    masses = class_masses(make_distribution(w, small_cohort))
    assert summary.binary_probs["le25"] == masses["low"] + masses["intermediate"]


def test_histogram_boundary_goes_to_lower_bin():
    dist = dist_from([(0, 0.25), (5, 0.25), (5.1, 0.25), (100, 0.25)])
    bins = histogram(dist, bins=20)
    assert bins[0] == (0.0, 5.0, 0.5)       # 0 stays in bin 0; 5 belongs to (0, 5]
    assert bins[1] == (5.0, 10.0, 0.25)
    assert bins[19] == (95.0, 100.0, 0.25)


def test_histogram_mass_matches_brute_force(small_forest, small_cohort):
    w = forest_weights(small_forest, small_cohort, random_query(np.random.default_rng(9)))
    dist = make_distribution(w, small_cohort)
    bins = histogram(dist, bins=20)
    assert abs(sum(mass for _, _, mass in bins) - 1.0) <= 1e-12
    for lo, hi, mass in bins:
        if lo == 0.0:
            expected = dist.weights[(dist.values >= lo) & (dist.values <= hi)].sum()
        else:
            expected = dist.weights[(dist.values > lo) & (dist.values <= hi)].sum()
        assert mass == pytest.approx(expected, abs=1e-12)


def test_credible_interval_brackets_median(small_forest, small_cohort):
    w = forest_weights(small_forest, small_cohort, random_query(np.random.default_rng(15)))
    summary = summarize(make_distribution(w, small_cohort))
    lo, hi = summary.credible_interval_90
    assert lo <= summary.median <= hi


def test_marginal_distribution_is_uniform_over_rows(small_cohort):
    dist = marginal_distribution(small_cohort)
    assert abs(dist.weights.sum() - 1.0) <= 1e-12
    assert dist.values.size == np.unique(small_cohort.responses).size


def test_risk_classes_banding():
    classes = RiskClasses()
    assert classes.band(15.9) == "low"
    assert classes.band(16) == "intermediate"
    assert classes.band(25) == "intermediate"
    assert classes.band(25.1) == "high"
    with pytest.raises(ValueError):
        RiskClasses(low_cut=30, high_cut=25)
