import numpy as np
import pytest

from eegscreen.config import PipelineConfig
from eegscreen.errors import InvalidArgumentError
from eegscreen.pipeline import (
    FEATURE_SETS,
    column_names,
    extract_matrix,
    extract_subjects,
    resolve_feature_set,
    select_features,
    split_column,
)
from eegscreen.synth import CohortSpec, synth_cohort

SMALL = CohortSpec(n_depressed=2, n_control=3, duration_s=12.0)


@pytest.fixture(scope="module")
def small():
    return synth_cohort(SMALL)


def test_feature_set_sizes():
    assert len(FEATURE_SETS["paper-knn-12"]) * 3 == 12
    assert len(FEATURE_SETS["paper-svm-18"]) * 3 == 18


def test_custom_feature_list():
    assert resolve_feature_set("c0, pow_mean") == ("c0", "pow_mean")
    for bad in ("", "c0,c0", "entropy"):
        with pytest.raises(InvalidArgumentError):
            resolve_feature_set(bad)


def test_column_order_is_channel_major():
    assert column_names(("Fp1", "Fpz"), ("cd", "c0")) == ["Fp1_cd", "Fp1_c0", "Fpz_cd", "Fpz_c0"]
    assert split_column("Fp2_pow_center") == ("Fp2", "pow_center")
    assert split_column("age") is None


def test_extract_matrix_shape_and_order(small):
    cfg = PipelineConfig()
    rev = slice(None, None, -1)
    m = extract_matrix(small.recordings[rev], small.labels[rev], small.subject_ids[rev], small.channels,
                       small.fs, cfg, "paper-svm-18")
    assert m.values.shape == (5, 18)
    assert list(m.subject_ids) == sorted(small.subject_ids)
    assert m.feature_names[:6] == ("Fp1_cd", "Fp1_renyi", "Fp1_c0", "Fp1_pow_max", "Fp1_pow_mean",
                                   "Fp1_pow_center")
    knn = select_features(m, "paper-knn-12")
    direct = extract_matrix(small.recordings, small.labels, small.subject_ids, small.channels, small.fs, cfg,
                            "paper-knn-12")
    np.testing.assert_array_equal(knn.values, direct.values)


def test_parallel_matches_serial(small):
    cfg = PipelineConfig()
    a = extract_matrix(small.recordings, small.labels, small.subject_ids, small.channels, small.fs, cfg,
                       "c0,pow_max", jobs=1)
    b = extract_matrix(small.recordings, small.labels, small.subject_ids, small.channels, small.fs, cfg,
                       "c0,pow_max", jobs=2)
    np.testing.assert_array_equal(a.values, b.values)


@pytest.mark.filterwarnings("ignore:Level value")
def test_failing_subject_is_skipped(small):
    recs = list(small.recordings)
    recs[1] = np.zeros((100, 3))  # too short for the Welch segment
    m, skipped = extract_subjects(recs, small.labels, small.subject_ids, small.channels, small.fs,
                                  PipelineConfig(), "pow_max")
    assert m.n_rows == 4 and [s for s, _ in skipped] == [small.subject_ids[1]]
    with pytest.raises(InvalidArgumentError):
        extract_matrix(recs, small.labels, small.subject_ids, small.channels, small.fs, PipelineConfig(),
                       "pow_max")


def test_ocular_stage_can_be_disabled(small):
    on = extract_matrix(small.recordings[:1], small.labels[:1], small.subject_ids[:1], small.channels, small.fs,
                        PipelineConfig(), "pow_max")
    off = extract_matrix(small.recordings[:1], small.labels[:1], small.subject_ids[:1], small.channels, small.fs,
                         PipelineConfig(ocular_enabled=False), "pow_max")
    assert not np.array_equal(on.values, off.values)
