"""Leave-one-out evaluation, grid search and group comparisons.

``depressed`` is the positive class: sensitivity is the hit rate on
depressed subjects, specificity the hit rate on controls.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import csv
import io
import json
import math
import warnings

import numpy as np
from scipy import stats

from . import classify as clf
from .classify import CONTROL, DEPRESSED
from .errors import InvalidArgumentError, TrainingFailedError

NORMALIZE_MODES = ("fold", "global")

PRESETS = {
    "paper-knn": {
        "classifier": "knn",
        "feature_set": "paper-knn-12",
        "grid": [{"k": k} for k in range(1, 19)],
    },
    "paper-svm": {
        "classifier": "svm",
        "feature_set": "paper-svm-18",
        "grid": [{"kernel": "rbf", "c": 2.0, "gamma": 2.0**-6}],
    },
    "svm-linear": {
        "classifier": "svm",
        "feature_set": "paper-svm-18",
        "grid": [{"kernel": "linear", "c": 2.0}],
    },
    "logreg": {
        "classifier": "logreg",
        "feature_set": "paper-svm-18",
        "grid": [{"l2": 1e-4}],
    },
}


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def as_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def _ratio(num, den):
    return None if den == 0 else Fraction(num, den)


def metrics_exact(confusion):
    """Accuracy, sensitivity, specificity as exact fractions; ``None`` where undefined."""
    c = confusion
    if min(c.tp, c.fp, c.tn, c.fn) < 0:
        raise InvalidArgumentError("confusion cells must be nonnegative")
    return _ratio(c.tp + c.tn, c.total), _ratio(c.tp, c.tp + c.fn), _ratio(c.tn, c.tn + c.fp)


def metrics(confusion):
    return tuple(None if v is None else float(v) for v in metrics_exact(confusion))


@dataclass(frozen=True)
class FoldResult:
    subject_id: str
    true_label: str
    predicted: str = None
    status: str = "ok"


def confusion_from_folds(folds):
    tp = fp = tn = fn = 0
    for f in folds:
        if f.status != "ok":
            continue
        if f.true_label == DEPRESSED:
            tp += f.predicted == DEPRESSED
            fn += f.predicted != DEPRESSED
        else:
            tn += f.predicted == CONTROL
            fp += f.predicted != CONTROL
    return Confusion(tp, fp, tn, fn)


@dataclass(frozen=True)
class CvReport:
    classifier: str
    best_params: dict
    feature_set: tuple
    normalize_mode: str
    per_fold: tuple
    confusion: Confusion
    accuracy: float
    sensitivity: float
    specificity: float
    failed_folds: int = 0
    grid: tuple = field(default=())

    def to_dict(self):
        return {
            "schema": "eegscreen.cv_report/1",
            "classifier": self.classifier,
            "best_params": dict(self.best_params),
            "normalize_mode": self.normalize_mode,
            "feature_set": list(self.feature_set),
            "n_subjects": len(self.per_fold),
            "confusion": self.confusion.as_dict(),
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "failed_folds": self.failed_folds,
            "per_fold": [
                {"subject_id": f.subject_id, "true": f.true_label, "predicted": f.predicted, "status": f.status}
                for f in self.per_fold
            ],
            "grid": [{"params": dict(p), "accuracy": a} for p, a in self.grid],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _fold_scaler(train, full, normalize_mode):
    return clf.zscore_fit(train if normalize_mode == "fold" else full)


def loocv(m, classifier="knn", params=None, normalize_mode="fold"):
    """Leave-one-out cross-validation of one classifier configuration.

    With ``normalize_mode="fold"`` the scaler is refit on every training
    split, so the held-out row never influences it; ``"global"`` fits one
    scaler on all rows up front. A fold whose training split lacks a class
    (or whose training fails) is reported as failed and left out of the
    metrics.
    """
    params = dict(params or {})
    if normalize_mode not in NORMALIZE_MODES:
        raise InvalidArgumentError(f"normalize_mode must be one of {NORMALIZE_MODES}, got {normalize_mode!r}")
    if m.n_rows < 2:
        raise InvalidArgumentError("leave-one-out needs at least two rows")
    if not {DEPRESSED, CONTROL} <= set(m.labels) or clf.UNKNOWN in m.labels:
        raise InvalidArgumentError("leave-one-out needs both labeled classes and no unknown labels")
    folds = []
    everything = np.arange(m.n_rows)
    for i in range(m.n_rows):
        train = m.rows(everything[everything != i])
        sid, truth = m.subject_ids[i], m.labels[i]
        if len(set(train.labels)) < 2:
            warnings.warn(f"fold {sid}: training split holds a single class; fold skipped", stacklevel=2)
            folds.append(FoldResult(sid, truth, None, "failed: single-class training split"))
            continue
        scaler = _fold_scaler(train, m, normalize_mode)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", clf.DegeneracyWarning)
            train_z = clf.zscore_apply(train, scaler)
            query = clf.standardize(m.values[i], scaler)
        try:
            model = clf.fit(classifier, params, train_z)
        except TrainingFailedError as exc:
            warnings.warn(f"fold {sid}: {exc}", stacklevel=2)
            folds.append(FoldResult(sid, truth, None, f"failed: {exc}"))
            continue
        folds.append(FoldResult(sid, truth, clf.predict(model, query)))
    confusion = confusion_from_folds(folds)
    acc, sen, spe = metrics(confusion)
    failed = sum(f.status != "ok" for f in folds)
    return CvReport(classifier, params, m.feature_names, normalize_mode, tuple(folds), confusion, acc, sen, spe, failed)


def grid_search(m, classifier, grid, normalize_mode="fold"):
    """Exhaustive LOOCV over ``grid``; highest accuracy wins, earliest entry on ties.

    KNN entries whose ``k`` exceeds the training rows of a fold are skipped
    with a warning.
    """
    grid = [dict(g) for g in grid]
    if not grid:
        raise InvalidArgumentError("empty parameter grid")
    if classifier == "knn":
        # every leave-one-out training split has n - 1 rows
        fits = [g for g in grid if int(g.get("k", 17)) <= m.n_rows - 1]
        if len(fits) < len(grid):
            dropped = sorted({int(g["k"]) for g in grid if g not in fits})
            warnings.warn(f"k values {dropped} exceed the {m.n_rows - 1} training rows per fold; skipped",
                          stacklevel=2)
        if not fits:
            raise InvalidArgumentError(f"no k in the grid fits {m.n_rows - 1} training rows")
        grid = fits
    best = None
    scores = []
    for params in grid:
        report = loocv(m, classifier, params, normalize_mode)
        acc = report.accuracy
        scores.append((params, acc))
        key = -1.0 if acc is None else acc
        if best is None or key > best[0]:
            best = (key, params, report)
    _, params, report = best
    return params, CvReport(
        report.classifier, params, report.feature_set, report.normalize_mode, report.per_fold,
        report.confusion, report.accuracy, report.sensitivity, report.specificity,
        report.failed_folds, tuple(scores),
    )


@dataclass(frozen=True)
class FeatureGroupStats:
    feature: str
    mean_depressed: float
    mean_control: float
    relative_diff_pct: float
    welch_t: float
    welch_p: float
    n_depressed: int
    n_control: int
    flag: str = ""


@dataclass(frozen=True)
class GroupSummary:
    rows: tuple

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["feature", "mean_depressed", "mean_control", "relative_diff_pct", "welch_t", "welch_p",
                    "n_depressed", "n_control", "flag"])
        for r in self.rows:
            w.writerow([r.feature, *(("" if v is None else repr(float(v))) for v in
                        (r.mean_depressed, r.mean_control, r.relative_diff_pct, r.welch_t, r.welch_p)),
                        r.n_depressed, r.n_control, r.flag])
        return buf.getvalue()


def welch_t_test(a, b):
    """Two-sided unequal-variance t-test; returns ``(t, p)`` or ``(None, None)`` if undefined."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        return None, None
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    se2 = va + vb
    if se2 == 0.0:
        return None, None
    t = (a.mean() - b.mean()) / math.sqrt(se2)
    df = se2**2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1))
    return float(t), float(2.0 * stats.t.sf(abs(t), df))


def group_summary(m):
    lab = np.asarray(m.labels)
    dep = lab == DEPRESSED
    con = lab == CONTROL
    if not dep.any() or not con.any():
        raise InvalidArgumentError("group summary needs both labeled classes")
    rows = []
    for j, name in enumerate(m.feature_names):
        a = m.values[dep, j]
        b = m.values[con, j]
        mean_d, mean_c = float(a.mean()), float(b.mean())
        flags = []
        rel = None if mean_c == 0.0 else 100.0 * (mean_d - mean_c) / mean_c
        if rel is None:
            flags.append("zero-control-mean")
        t, p = welch_t_test(a, b)
        if p is None:
            flags.append("small-group" if min(a.size, b.size) < 2 else "zero-variance")
        rows.append(FeatureGroupStats(name, mean_d, mean_c, rel, t, p, int(a.size), int(b.size), ";".join(flags)))
    return GroupSummary(tuple(rows))
