from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from eegscreen import classify as clf
from eegscreen import evaluation as ev
from eegscreen.classify import CONTROL, DEPRESSED, FeatureMatrix
from eegscreen.errors import InvalidArgumentError


def cohort_like(seed, shift=0.0, dim=4, n_dep=18, n_con=25):
    rng = np.random.default_rng(seed)
    labels = [DEPRESSED] * n_dep + [CONTROL] * n_con
    y = np.array([1.0] * n_dep + [-1.0] * n_con)
    x = rng.standard_normal((n_dep + n_con, dim)) + shift * y[:, None]
    ids = [f"sub-{i + 1:03d}" for i in range(n_dep + n_con)]
    return FeatureMatrix(x, labels, [f"f{j}" for j in range(dim)], ids)


def test_metrics_perfect():
    assert ev.metrics(ev.Confusion(tp=18, fp=0, tn=25, fn=0)) == (1.0, 1.0, 1.0)


def test_metrics_hand_arithmetic():
    acc, sen, spe = ev.metrics_exact(ev.Confusion(tp=13, fp=7, tn=18, fn=5))
    assert (acc, sen, spe) == (Fraction(31, 43), Fraction(13, 18), Fraction(18, 25))
    assert ev.metrics(ev.Confusion(13, 7, 18, 5))[0] == pytest.approx(0.7209, abs=1e-4)


def test_metrics_undefined_sensitivity():
    acc, sen, spe = ev.metrics(ev.Confusion(tp=0, fp=0, tn=5, fn=0))
    assert sen is None and acc == 1.0 and spe == 1.0
    assert ev.metrics(ev.Confusion()) == (None, None, None)


@settings(max_examples=100)
@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_metrics_exact_integer_identity(tp, fp, tn, fn):
    acc, sen, spe = ev.metrics_exact(ev.Confusion(tp, fp, tn, fn))
    if tp + fn:
        assert sen * (tp + fn) == tp
    if tn + fp:
        assert spe * (tn + fp) == tn
    if tp + fp + tn + fn:
        assert acc * (tp + fp + tn + fn) == tp + tn


def test_loocv_separable_is_perfect():
    m = cohort_like(0, shift=10.0)
    r = ev.loocv(m, "knn", {"k": 1})
    assert r.accuracy == 1.0


def test_loocv_structure_on_43_rows():
    m = cohort_like(1, shift=0.5)
    r = ev.loocv(m, "knn", {"k": 5})
    assert len(r.per_fold) == 43 and r.confusion.total == 43 and r.failed_folds == 0
    # metrics recompute from the fold list
    correct = sum(f.predicted == f.true_label for f in r.per_fold)
    assert r.accuracy == correct / 43
    assert r.to_json() == ev.loocv(m, "knn", {"k": 5}).to_json()


@pytest.mark.parametrize("seed", range(5))
def test_random_labels_on_identical_rows_give_majority_rate(seed):
    rng = np.random.default_rng(seed)
    labels = [DEPRESSED] * 18 + [CONTROL] * 25
    rng.shuffle(labels)
    m = FeatureMatrix(np.ones((43, 3)), labels, ["a", "b", "c"])
    r = ev.loocv(m, "knn", {"k": 42})
    assert r.accuracy == pytest.approx(25 / 43)


def test_single_class_training_fold_is_reported():
    m = FeatureMatrix([[0.0], [1.0], [2.0]], [DEPRESSED, CONTROL, CONTROL], ["a"])
    with pytest.warns(UserWarning, match="single class"):
        r = ev.loocv(m, "knn", {"k": 1})
    assert r.failed_folds == 1 and r.per_fold[0].status.startswith("failed")
    assert r.confusion.total == 2 and r.sensitivity is None


@pytest.mark.parametrize("classifier,params", [("knn", {"k": 3}), ("svm", {"kernel": "rbf", "c": 2.0, "gamma": 0.1}),
                                               ("logreg", {"l2": 1e-4})])
def test_fold_normalization_excludes_held_out_row(monkeypatch, classifier, params):
    m = cohort_like(2, shift=0.4)
    held = 11
    poisoned_values = m.values.copy()
    poisoned_values[held] = 1e9
    poisoned = m.with_values(poisoned_values)

    seen = []
    real_fit = clf.zscore_fit

    def spy(train):
        p = real_fit(train)
        seen.append((set(train.subject_ids), p))
        return p

    monkeypatch.setattr(clf, "zscore_fit", spy)
    ev.loocv(poisoned, classifier, params, "fold")
    fold_sets = [s for s, _ in seen]
    target = m.subject_ids[held]
    held_fit = [p for s, p in seen if target not in s]
    assert len(seen) == m.n_rows and sum(target not in s for s in fold_sets) == 1
    without = real_fit(m.rows([i for i in range(m.n_rows) if i != held]))
    np.testing.assert_array_equal(held_fit[0].means, without.means)
    np.testing.assert_array_equal(held_fit[0].stds, without.stds)

    seen.clear()
    ev.loocv(poisoned, classifier, params, "global")
    assert all(np.max(np.abs(p.means)) > 1e6 for _, p in seen)


def test_grid_search_matches_exhaustive_recomputation():
    m = cohort_like(3, shift=0.6)
    grid = [{"k": k} for k in range(1, 19)]
    best, report = ev.grid_search(m, "knn", grid)
    accs = [ev.loocv(m, "knn", g).accuracy for g in grid]
    assert best == grid[int(np.argmax(accs))]
    assert report.accuracy == max(accs)
    assert [a for _, a in report.grid] == accs


def test_grid_search_single_entry_and_ties():
    m = cohort_like(4, shift=10.0)
    best, _ = ev.grid_search(m, "knn", [{"k": 3}])
    assert best == {"k": 3}
    best, _ = ev.grid_search(m, "knn", [{"k": 1}, {"k": 3}])  # both perfect
    assert best == {"k": 1}
    with pytest.raises(InvalidArgumentError):
        ev.grid_search(m, "knn", [])


def test_loocv_input_checks():
    m = cohort_like(0)
    with pytest.raises(InvalidArgumentError):
        ev.loocv(m, "knn", {"k": 1}, normalize_mode="batch")
    unknown = FeatureMatrix(m.values, [clf.UNKNOWN] + list(m.labels[1:]), m.feature_names)
    with pytest.raises(InvalidArgumentError):
        ev.loocv(unknown, "knn", {"k": 1})


def test_welch_t_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.standard_normal(18) * rng.uniform(0.5, 2)
        b = rng.standard_normal(25) * rng.uniform(0.5, 2) + rng.uniform(-1, 1)
        t, p = ev.welch_t_test(a, b)
        ref = stats.ttest_ind(a, b, equal_var=False)
        assert t == pytest.approx(ref.statistic, rel=1e-12)
        assert p == pytest.approx(ref.pvalue, rel=1e-9)


def test_group_summary_cases():
    vals = np.column_stack([np.r_[np.full(18, 2.0), np.full(25, 4.0)], np.full(43, 1.0)])
    labels = [DEPRESSED] * 18 + [CONTROL] * 25
    s = ev.group_summary(FeatureMatrix(vals, labels, ["half", "same"]))
    assert s.rows[0].relative_diff_pct == pytest.approx(-50.0)
    assert s.rows[1].relative_diff_pct == 0.0
    assert s.rows[1].welch_p is None and s.rows[1].flag == "zero-variance"
    csv_text = s.to_csv()
    assert csv_text.splitlines()[0].startswith("feature,mean_depressed,mean_control")


def test_group_summary_shifted_groups():
    m = cohort_like(5, shift=1.5, dim=1)  # groups 3 sd apart
    row = ev.group_summary(m).rows[0]
    assert row.welch_p < 1e-3 and row.n_depressed == 18 and row.n_control == 25


def test_group_summary_small_group():
    m = FeatureMatrix([[1.0], [2.0], [3.0]], [DEPRESSED, CONTROL, CONTROL], ["a"])
    assert ev.group_summary(m).rows[0].flag == "small-group"


def test_report_dict_schema():
    r = ev.loocv(cohort_like(6, shift=1.0), "knn", {"k": 3})
    d = r.to_dict()
    assert d["schema"] == "eegscreen.cv_report/1" and d["n_subjects"] == 43
    assert sum(d["confusion"].values()) == 43 and d["normalize_mode"] == "fold"
