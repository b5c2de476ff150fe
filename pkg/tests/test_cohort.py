import numpy as np
import pytest

from distforest import (
    COHORT_MARGINALS,
    CohortMarginals,
    PatientRecord,
    ResponseLink,
    load_cohort,
    synth_cohort,
    write_cohort,
)
from distforest.cohort import Band, CohortFormatError, band_label
from distforest.data import feature_index
from distforest.reporting import format_cohort_table

HEADER = "id,age,tumor_size_cm,p53_pct,sbr_grade,mitotic_grade,er_pct,pr_pct,ki67_pct,lymph_nodes,odx_score"


def write_csv(tmp_path, rows, header=HEADER):
    path = tmp_path / "cohort.csv"
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return path


def test_load_valid_row(tmp_path):
    path = write_csv(tmp_path, ["P1,63,1.5,8,2,1,95,80,18,1,14"])
    data, rejected = load_cohort(path)
    assert rejected == []
    assert data.n == 1
    assert data.ids == ("P1",)
    assert data.responses[0] == 14.0
    assert data.features[0, feature_index("age")] == 63.0
    assert data.features[0, feature_index("lymph_nodes")] == 1.0


def test_load_rejects_out_of_range_ki67(tmp_path):
    path = write_csv(
        tmp_path,
        [
            "P1,63,1.5,8,2,1,95,80,18,1,14",
            "P2,55,2.0,5,2,2,90,70,250,0,20",
        ],
    )
    data, rejected = load_cohort(path)
    assert data.n == 1
    assert len(rejected) == 1
    assert rejected[0].line == 3
    assert rejected[0].column == "ki67_pct"
    assert "range" in rejected[0].reason


def test_load_blank_lymph_node_becomes_na_code(tmp_path):
    path = write_csv(tmp_path, ["P1,63,1.5,8,2,1,95,80,18,,14", "P2,55,2,5,2,2,90,70,30,NA,20"])
    data, rejected = load_cohort(path)
    assert rejected == []
    assert list(data.features[:, feature_index("lymph_nodes")]) == [-1.0, -1.0]


def test_load_rejects_non_numeric_cell(tmp_path):
    path = write_csv(tmp_path, ["P1,sixty,1.5,8,2,1,95,80,18,1,14", "P2,55,2,5,2,2,90,70,30,0,20"])
    data, rejected = load_cohort(path)
    assert data.n == 1
    assert rejected[0].column == "age"
    assert "non-numeric" in rejected[0].reason


def test_load_rejects_er_negative_rows(tmp_path):
    path = write_csv(tmp_path, ["P1,63,1.5,8,2,1,5,80,18,1,14", "P2,55,2,5,2,2,90,70,30,0,20"])
    data, rejected = load_cohort(path)
    assert data.n == 1
    assert rejected[0].column == "er_pct"


def test_load_missing_column_is_file_error(tmp_path):
    header = HEADER.replace(",odx_score", "")
    path = write_csv(tmp_path, ["P1,63,1.5,8,2,1,95,80,18,1"], header=header)
    with pytest.raises(CohortFormatError, match="odx_score"):
        load_cohort(path)


def test_load_missing_odx_rejects_row(tmp_path):
    path = write_csv(tmp_path, ["P1,63,1.5,8,2,1,95,80,18,1,", "P2,55,2,5,2,2,90,70,30,0,20"])
    data, rejected = load_cohort(path)
    assert data.n == 1
    assert "odx" in rejected[0].reason


def test_accepted_plus_rejected_equals_file_rows(tmp_path):
    rows = [
        "P1,63,1.5,8,2,1,95,80,18,1,14",
        "P2,55,2.0,5,2,2,90,70,250,0,20",  # ki67 out of range
        "P3,48,1.1,3,1,1,85,90,12,NA,9",
        "P4,-5,1.1,3,1,1,85,90,12,2,9",  # bad age
    ]
    path = write_csv(tmp_path, rows)
    data, rejected = load_cohort(path)
    assert data.n + len(rejected) == len(rows)


def test_csv_round_trip_identity(tmp_path):
    original = synth_cohort(n=50, seed=3)
    path = tmp_path / "out.csv"
    write_cohort(original, path)
    loaded, rejected = load_cohort(path)
    assert rejected == []
    assert loaded.ids == original.ids
    assert np.array_equal(loaded.features, original.features)
    assert np.array_equal(loaded.responses, original.responses)
    assert loaded.fingerprint() == original.fingerprint()


def test_patient_record_validation():
    record = PatientRecord(
        id="P1", age=63, tumor_size=1.5, p53=8, sbr_grade=2, mitotic_grade=1,
        er=95, pr=80, ki67=18, lymph_nodes=1, odx_score=14,
    )
    assert record.validation_errors() == []
    bad = PatientRecord(
        id="P2", age=63, tumor_size=1.5, p53=8, sbr_grade=2, mitotic_grade=1,
        er=95, pr=80, ki67=18, lymph_nodes=1, odx_score=140,
    )
    assert any(f == "odx_score" for f, _ in bad.validation_errors())


def test_synth_deterministic():
    a = synth_cohort(n=100, seed=42)
    b = synth_cohort(n=100, seed=42)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.responses, b.responses)
    assert a.fingerprint() == b.fingerprint()


def test_synth_333_age_band_near_published_share(cohort333):
    # published cohort share of age <= 50 is 30.63%; n=333 sampling noise
    observed = 100.0 * np.mean(cohort333.features[:, feature_index("age")] <= 50.0)
    assert abs(observed - 30.63) <= 5.0


def test_synth_10k_ki67_band_near_published_share():
    data = synth_cohort(n=10_000, seed=7)
    observed = 100.0 * np.mean(data.features[:, feature_index("ki67")] > 20.0)
    assert abs(observed - 62.76) <= 2.0


def test_synth_marginals_converge_at_10k():
    data = synth_cohort(n=10_000, seed=7)
    for name, bands in COHORT_MARGINALS.tables.items():
        col = data.features[:, feature_index(name)]
        for band in bands:
            observed = 100.0 * np.mean([band_label(COHORT_MARGINALS, name, v) == band.label for v in col])
            assert observed == pytest.approx(band.percent, abs=2.0), (name, band.label)


def test_synth_link_is_monotone_in_ki67():
    link = ResponseLink(noise_sd=0.0)
    base = synth_cohort(n=200, seed=1, link=link)
    shifted_features = base.features.copy()
    ki = feature_index("ki67")
    shifted_features[:, ki] = np.minimum(shifted_features[:, ki] + 10.0, 100.0)
    rng = np.random.default_rng(0)
    lo = link.score(base.features, np.random.default_rng(0))
    hi = link.score(shifted_features, np.random.default_rng(0))
    assert np.all(hi >= lo)


def test_synth_responses_in_range():
    data = synth_cohort(n=500, seed=9)
    assert data.responses.min() >= 0.0
    assert data.responses.max() <= 100.0


def test_marginal_tables_sum_to_hundred():
    for name, bands in COHORT_MARGINALS.tables.items():
        assert sum(b.percent for b in bands) == pytest.approx(100.0, abs=0.1), name
    with pytest.raises(ValueError):
        CohortMarginals(tables={"age": (Band("a", 60.0, 0, 1), Band("b", 30.0, 1, 2))}, odx_bands=(1, 1, 98))


def test_cohort_table_report_lists_bands(cohort333):
    table = format_cohort_table(cohort333)
    assert "population" in table
    assert "ki67" in table and ">20" in table
    assert "lymph_nodes" in table and "NA" in table
    # every feature row's band percentages add up to its total column
    for line in table.splitlines()[2:]:
        parts = line.split()
        low, mid, high, total = map(float, parts[-4:])
        assert low + mid + high == pytest.approx(total, abs=0.05)
