"""Distributional random forest for Oncotype DX recurrence-score prediction.

Predicts the full conditional distribution of the 0-100 recurrence score from
9 clinico-pathological features, derives risk-class probabilities and point
estimates, surfaces the most similar cohort patients via forest weights, and
validates itself with CRPS-based probabilistic scoring alongside the usual
classification metrics.
"""

from .data import Dataset, FEATURE_NAMES, FeatureVector
from .tree import SplitDecision, Tree, TreeConfig, best_split, fit_tree, leaf_of, tree_predict_mean
from .forest import (
    Forest,
    ForestConfig,
    NoOobTreesError,
    WeightVector,
    fit_forest,
    forest_weights,
    oob_weights_all,
    predict_mean,
)
from .distribution import (
    DEFAULT_RISK_CLASSES,
    DistributionSummary,
    PredictiveDistribution,
    RiskClasses,
    cdf,
    class_masses,
    make_distribution,
    marginal_distribution,
    predict_distribution,
    quantile,
    summarize,
)
from .evaluation import (
    ConfusionMatrix,
    CrpsReport,
    CvConfig,
    EvaluationResult,
    MetricsReport,
    OobUnavailableError,
    crps,
    crps_integral_oracle,
    kfold_cv,
    metrics,
    oob_evaluate,
    roc_auc,
)
from .neighbors import (
    DivergenceReport,
    NeighborList,
    NeighborhoodProfile,
    divergence_analysis,
    neighborhood_profile,
    top_neighbors,
)
from .cohort import (
    COHORT_MARGINALS,
    CohortMarginals,
    PatientRecord,
    RejectedRow,
    ResponseLink,
    load_cohort,
    synth_cohort,
    write_cohort,
)
from .model_io import MODEL_FORMAT, ModelFormatError, load_model, save_model

__version__ = "0.1.0"
