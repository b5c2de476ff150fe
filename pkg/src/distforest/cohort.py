"""Cohort ingestion and generation: CSV loading with per-row validation,
band marginals, and a synthetic-cohort generator for tests and demos.

The synthetic generator is test scaffolding, not a biological simulator: it
reproduces published marginal band frequencies feature-by-feature and ties
the response to the features through a simple documented monotone link.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import Dataset, FEATURE_NAMES, LYMPH_NA, feature_errors

#: canonical field -> default CSV header
DEFAULT_SCHEMA = {
    "id": "id",
    "age": "age",
    "tumor_size": "tumor_size_cm",
    "p53": "p53_pct",
    "sbr_grade": "sbr_grade",
    "mitotic_grade": "mitotic_grade",
    "er": "er_pct",
    "pr": "pr_pct",
    "ki67": "ki67_pct",
    "lymph_nodes": "lymph_nodes",
    "odx_score": "odx_score",
}

ER_POSITIVE_MIN = 10.0


class CohortFormatError(ValueError):
    """File-level cohort problem (missing columns, no valid rows)."""


@dataclass(frozen=True)
class PatientRecord:
    """One cohort row. lymph_nodes uses the -1 code for unknown/NA; odx_score
    is None only for pure-prediction inputs."""

    id: str
    age: float
    tumor_size: float
    p53: float
    sbr_grade: int
    mitotic_grade: int
    er: float
    pr: float
    ki67: float
    lymph_nodes: int
    odx_score: float | None = None

    def feature_values(self) -> np.ndarray:
        return np.array(
            [
                self.age,
                self.tumor_size,
                self.p53,
                float(self.sbr_grade),
                float(self.mitotic_grade),
                self.er,
                self.pr,
                self.ki67,
                float(self.lymph_nodes),
            ]
        )

    def validation_errors(self) -> list[tuple[str, str]]:
        errors = feature_errors(self.feature_values())
        if self.er < ER_POSITIVE_MIN and not any(f == "er" for f, _ in errors):
            errors.append(("er", f"below ER-positive threshold ({ER_POSITIVE_MIN:g})"))
        if self.odx_score is not None and not (0.0 <= self.odx_score <= 100.0):
            errors.append(("odx_score", "out of range [0, 100]"))
        return errors


@dataclass(frozen=True)
class RejectedRow:
    line: int
    column: str
    reason: str


def _parse_cell(raw: str, column: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise _Rejection(RejectedRow(line, column, f"non-numeric value {raw!r}"))


class _Rejection(Exception):
    def __init__(self, rejected: RejectedRow):
        self.rejected = rejected


def _record_from_row(row: dict[str, str], schema: dict[str, str], line: int) -> PatientRecord:
    def cell(fieldname: str) -> str:
        return (row.get(schema[fieldname]) or "").strip()

    lymph_raw = cell("lymph_nodes")
    if lymph_raw == "" or lymph_raw.upper() == "NA":
        lymph = LYMPH_NA
    else:
        lymph_val = _parse_cell(lymph_raw, schema["lymph_nodes"], line)
        if lymph_val != int(lymph_val):
            raise _Rejection(RejectedRow(line, schema["lymph_nodes"], "must be an integer code"))
        lymph = int(lymph_val)

    odx_raw = cell("odx_score")
    if odx_raw == "":
        raise _Rejection(RejectedRow(line, schema["odx_score"], "missing odx_score"))

    def grade(fieldname: str) -> int:
        v = _parse_cell(cell(fieldname), schema[fieldname], line)
        if v not in (1.0, 2.0, 3.0):
            raise _Rejection(RejectedRow(line, schema[fieldname], "must be 1, 2, or 3"))
        return int(v)

    return PatientRecord(
        id=cell("id") or f"row{line}",
        age=_parse_cell(cell("age"), schema["age"], line),
        tumor_size=_parse_cell(cell("tumor_size"), schema["tumor_size"], line),
        p53=_parse_cell(cell("p53"), schema["p53"], line),
        sbr_grade=grade("sbr_grade"),
        mitotic_grade=grade("mitotic_grade"),
        er=_parse_cell(cell("er"), schema["er"], line),
        pr=_parse_cell(cell("pr"), schema["pr"], line),
        ki67=_parse_cell(cell("ki67"), schema["ki67"], line),
        lymph_nodes=lymph,
        odx_score=_parse_cell(odx_raw, schema["odx_score"], line),
    )


def dataset_from_records(records: list[PatientRecord]) -> Dataset:
    if not records:
        raise CohortFormatError("no valid rows in cohort")
    features = np.stack([r.feature_values() for r in records])
    responses = np.array([r.odx_score for r in records], dtype=float)
    return Dataset(features=features, responses=responses, ids=tuple(r.id for r in records))


def load_cohort(
    path, schema: dict[str, str] | None = None
) -> tuple[Dataset, list[RejectedRow]]:
    """Read a cohort CSV into a validated Dataset.

    Every row is checked against the patient-record invariants; invalid rows
    are returned as rejections (with their file line and offending column)
    instead of entering the dataset. Blank or "NA" lymph node cells map to
    the -1 unknown code. Raises CohortFormatError when a required column is
    missing or no row survives validation.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    records: list[PatientRecord] = []
    rejected: list[RejectedRow] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in schema.values() if col not in header]
        if missing:
            raise CohortFormatError(f"missing required columns: {', '.join(missing)}")
        for line, row in enumerate(reader, start=2):
            try:
                record = _record_from_row(row, schema, line)
            except _Rejection as exc:
                rejected.append(exc.rejected)
                continue
            errors = record.validation_errors()
            if errors:
                fieldname, reason = errors[0]
                rejected.append(RejectedRow(line, schema.get(fieldname, fieldname), reason))
                continue
            records.append(record)
    return dataset_from_records(records), rejected


def write_cohort(data: Dataset, path, schema: dict[str, str] | None = None) -> None:
    """Write a Dataset back to CSV (floats at full round-trip precision;
    unknown lymph nodes as "NA")."""
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    header = [schema[f] for f in DEFAULT_SCHEMA]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(data.n):
            row: list[str] = [data.ids[i]]
            for j, name in enumerate(FEATURE_NAMES):
                v = data.features[i, j]
                if name in ("sbr_grade", "mitotic_grade"):
                    row.append(str(int(v)))
                elif name == "lymph_nodes":
                    row.append("NA" if int(v) == LYMPH_NA else str(int(v)))
                else:
                    row.append(repr(float(v)))
            row.append(repr(float(data.responses[i])))
            writer.writerow(row)


# --- synthetic cohorts -----------------------------------------------------


@dataclass(frozen=True)
class Band:
    """One marginal category: its published frequency and the value range
    continuous draws are taken from (lo == hi for ordinal codes)."""

    label: str
    percent: float
    lo: float
    hi: float

    def sample(self, rng: np.random.Generator) -> float:
        if self.lo == self.hi:
            return self.lo
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class CohortMarginals:
    """Per-feature categorical frequency tables (percentages per band) plus
    the three response-band frequencies for reporting."""

    tables: dict[str, tuple[Band, ...]]
    odx_bands: tuple[float, float, float]  # low / intermediate / high %

    def __post_init__(self):
        for name, bands in self.tables.items():
            total = sum(b.percent for b in bands)
            if abs(total - 100.0) > 0.1:
                raise ValueError(f"{name} band percentages sum to {total}, expected 100")

    def probabilities(self, name: str) -> np.ndarray:
        pct = np.array([b.percent for b in self.tables[name]])
        return pct / pct.sum()


COHORT_MARGINALS = CohortMarginals(
    tables={
        "age": (Band("<=50", 30.63, 28.0, 50.0), Band(">50", 69.37, 50.0, 85.0)),
        "tumor_size": (
            Band("<1", 11.41, 0.3, 1.0),
            Band("1-2", 53.76, 1.0, 2.0),
            Band(">2", 34.83, 2.0, 5.0),
        ),
        "p53": (Band("<=10", 53.75, 0.0, 10.0), Band(">10", 46.25, 10.0, 100.0)),
        "sbr_grade": (Band("1", 8.71, 1, 1), Band("2", 55.86, 2, 2), Band("3", 35.43, 3, 3)),
        "mitotic_grade": (Band("1", 31.53, 1, 1), Band("2", 49.25, 2, 2), Band("3", 19.22, 3, 3)),
        "er": (Band("positive", 100.0, 10.0, 100.0),),
        "pr": (Band("negative", 17.72, 0.0, 10.0), Band("positive", 82.28, 10.0, 100.0)),
        "ki67": (
            Band("<10", 0.30, 0.0, 10.0),
            Band("10-20", 36.94, 10.0, 20.0),
            Band(">20", 62.76, 20.0, 90.0),
        ),
        "lymph_nodes": (
            Band("0", 45.35, 0, 0),
            Band("1", 29.13, 1, 1),
            Band("2", 7.81, 2, 2),
            Band("3", 6.00, 3, 3),
            Band("NA", 11.71, -1, -1),
        ),
    },
    odx_bands=(33.93, 41.44, 24.63),
)


@dataclass(frozen=True)
class ResponseLink:
    """Monotone score model for synthetic cohorts: higher Ki67, grades and
    p53 push the score up, higher PR pushes it down; Gaussian noise is added
    and the result is clipped to [0, 100]."""

    intercept: float = 0.0
    ki67_coef: float = 0.35
    sbr_step: float = 5.0
    mitotic_step: float = 3.0
    p53_coef: float = 0.05
    pr_coef: float = -0.10
    age_coef: float = 0.05
    noise_sd: float = 5.0

    def score(self, features: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        idx = {name: j for j, name in enumerate(FEATURE_NAMES)}
        linear = (
            self.intercept
            + self.ki67_coef * features[:, idx["ki67"]]
            + self.sbr_step * (features[:, idx["sbr_grade"]] - 1.0)
            + self.mitotic_step * (features[:, idx["mitotic_grade"]] - 1.0)
            + self.p53_coef * features[:, idx["p53"]]
            + self.pr_coef * features[:, idx["pr"]]
            + self.age_coef * np.maximum(features[:, idx["age"]] - 50.0, 0.0)
        )
        noisy = linear + rng.normal(0.0, self.noise_sd, size=features.shape[0])
        return np.clip(noisy, 0.0, 100.0)


def synth_cohort(
    marginals: CohortMarginals = COHORT_MARGINALS,
    n: int = 333,
    seed: int = 0,
    link: ResponseLink = ResponseLink(),
) -> Dataset:
    """Sample a reproducible synthetic cohort.

    Features are drawn independently: a band per the marginal frequencies,
    then a uniform value within the band; responses come from the link model.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 0x73796E74])
    features = np.empty((n, len(FEATURE_NAMES)))
    for j, name in enumerate(FEATURE_NAMES):
        bands = marginals.tables[name]
        choices = rng.choice(len(bands), size=n, p=marginals.probabilities(name))
        features[:, j] = [bands[c].sample(rng) for c in choices]
    responses = link.score(features, rng)
    ids = tuple(f"S{i + 1:04d}" for i in range(n))
    return Dataset(features=features, responses=responses, ids=ids)


def band_label(marginals: CohortMarginals, feature: str, value: float) -> str:
    """Classify a value into its reporting band (Table-style categories)."""
    if feature == "age":
        return "<=50" if value <= 50 else ">50"
    if feature == "tumor_size":
        return "<1" if value < 1 else ("1-2" if value <= 2 else ">2")
    if feature == "p53":
        return "<=10" if value <= 10 else ">10"
    if feature in ("sbr_grade", "mitotic_grade"):
        return str(int(value))
    if feature == "er":
        return "positive"
    if feature == "pr":
        return "negative" if value < 10 else "positive"
    if feature == "ki67":
        return "<10" if value < 10 else ("10-20" if value <= 20 else ">20")
    if feature == "lymph_nodes":
        return "NA" if int(value) == LYMPH_NA else str(int(value))
    raise ValueError(f"unknown feature: {feature}")
