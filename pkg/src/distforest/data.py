"""Shared data containers: the 9-slot clinico-pathological feature schema,
query feature vectors, and the training dataset (features + ODX responses).
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

FEATURE_NAMES = (
    "age",
    "tumor_size",
    "p53",
    "sbr_grade",
    "mitotic_grade",
    "er",
    "pr",
    "ki67",
    "lymph_nodes",
)
NUM_FEATURES = len(FEATURE_NAMES)

PERCENT_FEATURES = ("p53", "er", "pr", "ki67")
GRADE_FEATURES = ("sbr_grade", "mitotic_grade")
#: lymph node codes; -1 encodes unknown/NA and sorts below every real count,
#: so a split can isolate the unknown group.
LYMPH_NODE_CODES = (-1, 0, 1, 2, 3)
LYMPH_NA = -1

ODX_MIN = 0.0
ODX_MAX = 100.0

_INDEX = {name: i for i, name in enumerate(FEATURE_NAMES)}


def feature_index(name: str) -> int:
    """Column index of a feature by its canonical name."""
    return _INDEX[name]


def feature_errors(values) -> list[tuple[str, str]]:
    """Validate one 9-slot feature vector; returns (field, message) pairs.

    Only lymph_nodes may encode missingness (code -1); every other slot must
    hold a valid value in its range.
    """
    values = np.asarray(values, dtype=float)
    errors: list[tuple[str, str]] = []
    if values.shape != (NUM_FEATURES,):
        return [("values", f"expected {NUM_FEATURES} feature slots, got shape {values.shape}")]
    if not np.all(np.isfinite(values)):
        for i, v in enumerate(values):
            if not np.isfinite(v):
                errors.append((FEATURE_NAMES[i], "value is not finite"))
        return errors
    if values[_INDEX["age"]] <= 0:
        errors.append(("age", "must be positive"))
    if values[_INDEX["tumor_size"]] <= 0:
        errors.append(("tumor_size", "must be positive"))
    for name in PERCENT_FEATURES:
        v = values[_INDEX[name]]
        if not (0.0 <= v <= 100.0):
            errors.append((name, "out of range [0, 100]"))
    for name in GRADE_FEATURES:
        v = values[_INDEX[name]]
        if v not in (1.0, 2.0, 3.0):
            errors.append((name, "must be 1, 2, or 3"))
    lymph = values[_INDEX["lymph_nodes"]]
    if lymph not in (-1.0, 0.0, 1.0, 2.0, 3.0):
        errors.append(("lymph_nodes", "must be -1 (unknown) or a node count 0-3"))
    return errors


@dataclass(frozen=True)
class FeatureVector:
    """A single query point: the 9 clinico-pathological feature slots."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (NUM_FEATURES,):
            raise ValueError(f"feature vector must have {NUM_FEATURES} slots")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, mapping) -> "FeatureVector":
        missing = [n for n in FEATURE_NAMES if n not in mapping]
        if missing:
            raise ValueError(f"missing features: {', '.join(missing)}")
        return cls(np.array([float(mapping[n]) for n in FEATURE_NAMES]))

    def __getitem__(self, name: str) -> float:
        return float(self.values[_INDEX[name]])

    def as_dict(self) -> dict[str, float]:
        return {n: float(self.values[i]) for i, n in enumerate(FEATURE_NAMES)}

    def validate(self) -> None:
        errors = feature_errors(self.values)
        if errors:
            raise ValueError("; ".join(f"{f}: {m}" for f, m in errors))


def as_feature_values(x) -> np.ndarray:
    """Coerce a FeatureVector or raw sequence to a (9,) float array."""
    if isinstance(x, FeatureVector):
        return x.values
    values = np.asarray(x, dtype=float)
    if values.shape != (NUM_FEATURES,):
        raise ValueError(f"feature vector must have {NUM_FEATURES} slots")
    return values


@dataclass(frozen=True)
class Dataset:
    """Training pairs: an (n, 9) feature matrix, n ODX responses, n row ids."""

    features: np.ndarray
    responses: np.ndarray
    ids: tuple[str, ...] = field(default=())

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=float)
        responses = np.ascontiguousarray(self.responses, dtype=float)
        if features.ndim != 2 or features.shape[1] != NUM_FEATURES:
            raise ValueError(f"features must be an (n, {NUM_FEATURES}) matrix")
        n = features.shape[0]
        if n < 1:
            raise ValueError("dataset must contain at least one row")
        if responses.shape != (n,):
            raise ValueError("responses length must match feature rows")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if np.any(responses < ODX_MIN) or np.any(responses > ODX_MAX):
            raise ValueError(f"responses must lie in [{ODX_MIN:g}, {ODX_MAX:g}]")
        ids = tuple(self.ids) if self.ids else tuple(f"R{i}" for i in range(n))
        if len(ids) != n:
            raise ValueError("ids length must match feature rows")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    def feature_vector(self, i: int) -> FeatureVector:
        return FeatureVector(self.features[i].copy())

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(
            features=self.features[rows],
            responses=self.responses[rows],
            ids=tuple(self.ids[i] for i in rows),
        )

    def fingerprint(self) -> str:
        """Content hash of the training data; recorded in fitted models so a
        model can be checked against the cohort it was trained on."""
        h = hashlib.sha256()
        h.update(b"distforest-dataset/v1")
        h.update(struct.pack("<q", self.n))
        h.update(np.ascontiguousarray(self.features, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.responses, dtype="<f8").tobytes())
        for row_id in self.ids:
            h.update(row_id.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()
