import numpy as np
import pytest

from distforest import Dataset, ForestConfig, TreeConfig, fit_forest, synth_cohort

# Pinned seeds so every expected value in the suite is reproducible.
SYNTH_SEED = 11
FOREST_SEED = 3


def toy_dataset(x_col0, responses):
    """Dataset with one informative feature column and the rest zero."""
    x = np.asarray(x_col0, dtype=float)
    features = np.column_stack([x] + [np.zeros_like(x)] * 8)
    return Dataset(features=features, responses=np.asarray(responses, dtype=float))


def random_query(rng):
    """A feature vector sampled within the valid slot ranges."""
    return np.array(
        [
            rng.uniform(28.0, 85.0),          # age
            rng.uniform(0.3, 5.0),            # tumor_size
            rng.uniform(0.0, 100.0),          # p53
            float(rng.integers(1, 4)),        # sbr_grade
            float(rng.integers(1, 4)),        # mitotic_grade
            rng.uniform(10.0, 100.0),         # er
            rng.uniform(0.0, 100.0),          # pr
            rng.uniform(0.0, 90.0),           # ki67
            float(rng.integers(-1, 4)),       # lymph_nodes
        ]
    )


@pytest.fixture(scope="session")
def cohort333():
    return synth_cohort(n=333, seed=SYNTH_SEED)


@pytest.fixture(scope="session")
def forest500(cohort333):
    config = ForestConfig(num_trees=500, seed=FOREST_SEED)
    return fit_forest(cohort333, config)


@pytest.fixture(scope="session")
def small_cohort():
    return synth_cohort(n=80, seed=5)


@pytest.fixture(scope="session")
def small_forest(small_cohort):
    config = ForestConfig(num_trees=60, seed=21, tree=TreeConfig(min_leaf_size=3))
    return fit_forest(small_cohort, config)
