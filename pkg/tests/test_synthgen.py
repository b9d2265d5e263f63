import json

import numpy as np
import pytest

from edm_rulex import studydata
from edm_rulex.errors import NumericError, ValidationError
from edm_rulex.synthgen import (
    GroupSpec,
    PlantedRuleSpec,
    PopulationSpec,
    cholesky_factor,
    default_discretization,
    discretize_cohort,
    nearest_pd_correlation,
    plant_rules,
    sample_population,
    tertile_cuts,
    write_dataset_csv,
    write_raw_csv,
)


def _spec(dims, n, means, sds, corr, seed=0, token="g"):
    return PopulationSpec(
        dimensions=tuple(dims),
        groups={token: GroupSpec(n, tuple(means), tuple(sds), tuple(map(tuple, corr)))},
        seed=seed,
    )


def test_cholesky_identity():
    lower = cholesky_factor(np.eye(3))
    assert np.allclose(lower, np.eye(3))


def test_cholesky_closed_form():
    lower = cholesky_factor(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert np.allclose(lower, [[1.0, 0.0], [0.5, np.sqrt(0.75)]])
    assert abs(lower[1, 1] - 0.8660) < 1e-4


def test_cholesky_reconstruction():
    rng = np.random.default_rng(11)
    m = rng.normal(size=(10, 10))
    spd = m.T @ m + np.eye(10)
    lower = cholesky_factor(spd)
    assert np.abs(lower @ lower.T - spd).max() < 1e-10
    assert np.allclose(np.triu(lower, 1), 0)


def test_cholesky_not_pd_names_minor():
    bad = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 2.0], [0.0, 2.0, 1.0]])
    with pytest.raises(NumericError, match="order 3"):
        cholesky_factor(bad)
    with pytest.raises(ValidationError, match="symmetric"):
        cholesky_factor(np.array([[1.0, 0.2], [0.0, 1.0]]))


def test_nearest_pd_repair():
    bad = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
    fixed = nearest_pd_correlation(bad)
    assert np.linalg.eigvalsh(fixed).min() > 0
    assert np.allclose(np.diag(fixed), 1.0)
    cholesky_factor(fixed)  # must not raise


def test_sample_population_means():
    spec = _spec(["x", "y"], 10000, [0.0, 5.0], [1.0, 2.0], np.eye(2), seed=5)
    cohort = sample_population(spec)
    rows = cohort.groups["g"]
    for j, (mean, sd) in enumerate([(0.0, 1.0), (5.0, 2.0)]):
        assert abs(rows[:, j].mean() - mean) < 3 * sd / np.sqrt(10000)


def test_sample_population_zero_sd():
    spec = _spec(["x", "y"], 20, [1.5, -2.0], [0.0, 0.0], np.eye(2), seed=1)
    rows = sample_population(spec).groups["g"]
    assert np.allclose(rows, [1.5, -2.0])


def test_female_study_time_grand_mean():
    # target mean recovered across 200 reseeded cohorts of n=48
    target = studydata.SCALE_MOMENTS["Management of study time"][studydata.FEMALE][0]
    dim = studydata.RAW_DIMENSIONS.index("Management of study time")
    total, count = 0.0, 0
    for seed in range(200):
        spec = studydata.default_population_spec(n_male=2, n_female=48, seed=seed)
        rows = sample_population(spec).groups[studydata.FEMALE]
        total += rows[:, dim].sum()
        count += rows.shape[0]
    assert abs(total / count - target) < 0.1
    assert target == 17.333


def test_identity_correlation_stays_flat():
    spec = _spec(["a", "b", "c"], 10000, [0, 0, 0], [1, 1, 1], np.eye(3), seed=9)
    rows = sample_population(spec).groups["g"]
    corr = np.corrcoef(rows, rowvar=False)
    off = corr[~np.eye(3, dtype=bool)]
    assert np.abs(off).max() < 0.05


def test_planted_correlation_recovered():
    corr = [[1.0, 0.7], [0.7, 1.0]]
    spec = _spec(["a", "b"], 10000, [0, 0], [1, 3], corr, seed=13)
    rows = sample_population(spec).groups["g"]
    r = np.corrcoef(rows, rowvar=False)[0, 1]
    assert abs(r - 0.7) < 0.05


def test_generation_deterministic():
    schema = studydata.default_student_schema()
    outputs = []
    for _ in range(2):
        spec = studydata.default_population_spec(seed=21)
        cohort = sample_population(spec)
        disc = default_discretization(cohort, schema, studydata.SCORE_MAXIMA)
        records = discretize_cohort(cohort, disc, schema)
        outputs.append(write_dataset_csv(records, schema) + write_raw_csv(cohort))
    assert outputs[0] == outputs[1]


def test_population_spec_round_trip_preserves_group_order():
    spec = studydata.default_population_spec(seed=3)
    doc = json.loads(json.dumps(spec.to_dict(), sort_keys=True))  # key order destroyed
    back = PopulationSpec.from_dict(doc)
    assert list(back.groups) == list(spec.groups) == ["Ma", "Fe"]
    assert back == spec


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=0),
        dict(sds=(-1.0, 1.0)),
        dict(corr=[[1.0, 0.5], [0.4, 1.0]]),
        dict(corr=[[1.0, 1.5], [1.5, 1.0]]),
        dict(corr=[[0.9, 0.0], [0.0, 1.0]]),
    ],
)
def test_population_spec_validation(kwargs):
    base = dict(n=10, means=(0.0, 0.0), sds=(1.0, 1.0), corr=np.eye(2))
    base.update(kwargs)
    with pytest.raises(ValidationError):
        _spec(["x", "y"], base["n"], base["means"], base["sds"], base["corr"])


def _unit1_planted(noise=0.0):
    return PlantedRuleSpec(
        pairs=(
            ((("Unit 1", ("F",)),), "F"),
            ((), "P"),
        ),
        noise=noise,
    )


def test_plant_rules_noiseless():
    schema = studydata.default_student_schema()
    spec = studydata.default_population_spec(n_male=300, n_female=300, seed=2)
    cohort = sample_population(spec)
    disc = default_discretization(cohort, schema, studydata.SCORE_MAXIMA)
    records = plant_rules(cohort, _unit1_planted(), disc, schema, seed=0)
    assert len(records) == 600
    for r in records:
        expected = "F" if r.values["Unit 1"] == "F" else "P"
        assert r.values["Reasoning"] == expected


def test_plant_rules_noise_fraction():
    schema = studydata.default_student_schema()
    spec = studydata.default_population_spec(n_male=5000, n_female=5000, seed=2)
    cohort = sample_population(spec)
    disc = default_discretization(cohort, schema, studydata.SCORE_MAXIMA)
    clean = plant_rules(cohort, _unit1_planted(0.0), disc, schema, seed=0)
    noisy = plant_rules(cohort, _unit1_planted(0.1), disc, schema, seed=123)
    flipped = sum(
        a.values["Reasoning"] != b.values["Reasoning"] for a, b in zip(clean, noisy)
    )
    assert 0.08 <= flipped / len(clean) <= 0.12


def test_plant_rules_catch_all_only():
    schema = studydata.default_student_schema()
    spec = studydata.default_population_spec(n_male=5, n_female=5, seed=2)
    cohort = sample_population(spec)
    disc = default_discretization(cohort, schema, studydata.SCORE_MAXIMA)
    planted = PlantedRuleSpec(pairs=(((), "G"),), noise=0.0)
    records = plant_rules(cohort, planted, disc, schema, seed=0)
    assert {r.values["Reasoning"] for r in records} == {"G"}


def test_planted_spec_requires_catch_all():
    with pytest.raises(ValidationError, match="catch-all"):
        PlantedRuleSpec(pairs=(((("Unit 1", ("F",)),), "F"),), noise=0.0)


def test_tertile_example():
    rng = np.random.default_rng(0)
    lo, hi = tertile_cuts(rng.random(10**5))
    assert abs(lo - 1 / 3) < 0.01 and abs(hi - 2 / 3) < 0.01


def test_sample_population_propagates_cholesky_failure():
    bad = [[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]]
    spec = _spec(["a", "b", "c"], 10, [0, 0, 0], [1, 1, 1], bad)
    sample_population(spec, repair=True)  # repaired silently
    with pytest.raises(NumericError, match="positive definite"):
        sample_population(spec, repair=False)


def test_cohort_write_read_round_trip(tmp_path):
    from edm_rulex.schema import parse_dataset_csv
    from edm_rulex.synthgen import build_metadata, parse_raw_csv, write_cohort

    schema = studydata.default_student_schema()
    spec = studydata.default_population_spec(n_male=250, n_female=250, seed=7)
    cohort = sample_population(spec)
    disc = default_discretization(cohort, schema, studydata.SCORE_MAXIMA)
    records = discretize_cohort(cohort, disc, schema)
    paths = write_cohort(
        tmp_path / "cohort", schema, records, cohort, build_metadata(spec, schema, disc)
    )
    parsed = parse_dataset_csv(paths["csv"].read_text(), schema)
    assert len(parsed) == 500
    assert [r.values for r in parsed] == [r.values for r in records]
    dims, raw = parse_raw_csv(paths["raw"].read_text())
    assert dims == cohort.dimensions
    stacked = np.vstack([cohort.groups["Ma"], cohort.groups["Fe"]])
    assert np.array_equal(raw, stacked)  # repr() round-trips floats exactly
