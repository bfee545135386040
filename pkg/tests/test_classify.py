import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eegscreen import classify as clf
from eegscreen.classify import CONTROL, DEPRESSED, FeatureMatrix, KnnConfig
from eegscreen.errors import DegeneracyWarning, InvalidArgumentError, TrainingFailedError


def matrix(values, labels, names=None):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    names = names or [f"f{j}" for j in range(values.shape[1])]
    return FeatureMatrix(values, labels, names)


def signed(y):
    return [DEPRESSED if v > 0 else CONTROL for v in y]


def blobs(seed, n=200, dim=3, shift=1.0):
    rng = np.random.default_rng(seed)
    y = np.where(rng.uniform(size=n) < 0.5, 1.0, -1.0)
    x = rng.standard_normal((n, dim)) + shift * y[:, None]
    return matrix(x, signed(y))


def knn_oracle(train_x, train_labels, q, k):
    """Exhaustive sort with the documented tie rules, in plain Python."""
    dists = []
    for i, row in enumerate(train_x):
        dists.append((math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(row, q))), i))
    dists.sort()
    votes = {DEPRESSED: [0, 0.0], CONTROL: [0, 0.0]}
    for d, i in dists[:k]:
        votes[train_labels[i]][0] += 1
        votes[train_labels[i]][1] += d
    (nd, sd), (nc, sc) = votes[DEPRESSED], votes[CONTROL]
    if nd != nc:
        return DEPRESSED if nd > nc else CONTROL
    return CONTROL if sc < sd else DEPRESSED


def qp_oracle(kmat, y, c):
    """Dual SVM solved by an interior-point QP solver."""
    cvxopt = pytest.importorskip("cvxopt")
    from cvxopt import matrix as cm, solvers

    n = y.size
    p = cm(np.outer(y, y) * kmat)
    q = cm(-np.ones(n))
    g = cm(np.vstack([-np.eye(n), np.eye(n)]))
    h = cm(np.hstack([np.zeros(n), np.full(n, c)]))
    a = cm(y.reshape(1, -1))
    solvers.options.update({"show_progress": False, "abstol": 1e-12, "reltol": 1e-12, "feastol": 1e-12})
    alpha = np.array(solvers.qp(p, q, g, h, a, cm(0.0))["x"]).ravel()
    free = (alpha > 1e-6 * c) & (alpha < c * (1 - 1e-6))
    grad = (np.outer(y, y) * kmat) @ alpha - 1.0
    bias = float(np.mean(-y[free] * grad[free])) if free.any() else 0.0
    return alpha, bias


def dual_objective(alpha, kmat, y):
    return 0.5 * alpha @ (np.outer(y, y) * kmat) @ alpha - alpha.sum()


# ---------------------------------------------------------------- FeatureMatrix + scaling

def test_feature_matrix_validation():
    with pytest.raises(InvalidArgumentError):
        matrix([[1.0], [np.nan]], [DEPRESSED, CONTROL])
    with pytest.raises(InvalidArgumentError):
        matrix([[1.0]], ["sick"])
    with pytest.raises(InvalidArgumentError):
        FeatureMatrix(np.zeros((2, 2)), [DEPRESSED, CONTROL], ["a", "a"])
    with pytest.raises(InvalidArgumentError):
        FeatureMatrix(np.zeros((2, 1)), [DEPRESSED, CONTROL], ["a"], ["s1", "s1"])


def test_zscore_small_cases():
    p = clf.zscore_fit(matrix([1.0, 3.0], [DEPRESSED, CONTROL]))
    assert p.means[0] == 2.0 and p.stds[0] == pytest.approx(math.sqrt(2))
    p = clf.zscore_fit(matrix([5.0, 5.0, 5.0], [DEPRESSED, CONTROL, CONTROL]))
    assert p.means[0] == 5.0 and p.stds[0] == 0.0 and p.degenerate[0]


def test_zscore_needs_two_rows():
    with pytest.raises(InvalidArgumentError):
        clf.zscore_fit(matrix([1.0], [DEPRESSED]))


def test_zscore_standardizes_columns():
    m = blobs(0, n=50, dim=4)
    z = clf.zscore_apply(m, clf.zscore_fit(m)).values
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=0, ddof=1), 1.0, atol=1e-12)


def test_zero_std_column_maps_to_zero():
    m = matrix([[1.0, 2.0], [1.0, 4.0], [1.0, 9.0]], [DEPRESSED, CONTROL, CONTROL])
    with pytest.warns(DegeneracyWarning):
        z = clf.zscore_apply(m, clf.zscore_fit(m))
    assert np.all(z.values[:, 0] == 0.0)


def test_held_out_row_uses_train_statistics():
    train = matrix([2.0, 4.0, 6.0], [DEPRESSED, CONTROL, CONTROL])
    p = clf.zscore_fit(train)
    # train mean 4, sample std 2: (10 - 4) / 2
    assert clf.standardize([10.0], p)[0] == pytest.approx(3.0)


def test_standardize_dimension_mismatch():
    p = clf.zscore_fit(blobs(0, n=10, dim=3))
    with pytest.raises(InvalidArgumentError):
        clf.standardize([1.0, 2.0], p)


# ---------------------------------------------------------------- KNN

def test_knn_exact_match_k1():
    m = blobs(1, n=20)
    assert clf.knn_predict(m, m.values[7], KnnConfig(1)) == m.labels[7]


def test_knn_two_clusters():
    x = [[0, 0], [0, 0.5], [0.5, 0], [10, 10], [10, 10.5], [10.5, 10]]
    m = matrix(x, [DEPRESSED] * 3 + [CONTROL] * 3)
    assert clf.knn_predict(m, [1.0, 1.0], KnnConfig(3)) == DEPRESSED


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_knn_matches_exhaustive_oracle(seed):
    train = blobs(seed, n=200, dim=4, shift=0.4)
    queries = np.random.default_rng(100 + seed).standard_normal((40, 4))
    for k in range(1, 19):
        for q in queries:
            assert clf.knn_predict(train, q, KnnConfig(k)) == knn_oracle(train.values, train.labels, q, k)


def test_knn_tie_rules():
    m = matrix([-1.0, 2.0], [DEPRESSED, CONTROL])
    assert clf.knn_predict(m, [0.0], KnnConfig(2)) == DEPRESSED  # closer depressed neighbour
    m = matrix([-1.0, 1.0], [DEPRESSED, CONTROL])
    assert clf.knn_predict(m, [0.0], KnnConfig(2)) == DEPRESSED  # full tie
    m = matrix([1.0, 1.0, 5.0], [CONTROL, DEPRESSED, DEPRESSED])
    assert clf.knn_predict(m, [1.0], KnnConfig(1)) == CONTROL  # equal distance, lower index


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.01, 100.0), st.integers(1, 9))
def test_knn_scale_invariance(seed, scale, k):
    m = blobs(seed, n=30, dim=2, shift=0.3)
    q = np.random.default_rng(seed + 1).standard_normal(2)
    scaled = m.with_values(m.values * scale)
    assert clf.knn_predict(m, q, KnnConfig(k)) == clf.knn_predict(scaled, q * scale, KnnConfig(k))


def test_knn_errors():
    m = blobs(0, n=5)
    with pytest.raises(InvalidArgumentError):
        clf.knn_predict(m, [0.0, 0.0, 0.0], KnnConfig(6))
    with pytest.raises(InvalidArgumentError):
        clf.knn_predict(m, [0.0, 0.0], KnnConfig(1))
    with pytest.raises(InvalidArgumentError):
        clf.knn_predict(m.rows([]), [0.0, 0.0, 0.0], KnnConfig(1))
    with pytest.raises(InvalidArgumentError):
        KnnConfig(0)


# ---------------------------------------------------------------- SVM

def test_svm_symmetric_pair():
    m = matrix([-1.0, 1.0], [CONTROL, DEPRESSED])
    model = clf.svm_train(m, kernel="linear", c=1e6)
    assert model.decision_function([[0.0]])[0] == pytest.approx(0.0, abs=1e-9)
    w = float(np.sum(model.alphas * model.sv_labels * model.support_vectors[:, 0]))
    assert 2.0 / abs(w) == pytest.approx(2.0)
    assert clf.svm_predict(model, [0.0]) == DEPRESSED  # decision 0 goes to the positive class


def test_svm_xor():
    m = matrix([[0, 0], [1, 1], [0, 1], [1, 0]], [CONTROL, CONTROL, DEPRESSED, DEPRESSED])
    model = clf.svm_train(m, kernel="rbf", c=10.0, gamma=1.0)
    assert [clf.svm_predict(model, r) for r in m.values] == list(m.labels)
    assert clf.kkt_violation(model, m) <= 1e-3
    assert abs(np.dot(model.alphas, model.sv_labels)) < 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_svm_separable_linear(seed):
    m = blobs(seed, n=60, dim=2, shift=4.0)
    model = clf.svm_train(m, kernel="linear", c=10.0)
    assert all(clf.svm_predict(model, r) == lab for r, lab in zip(m.values, m.labels))
    assert np.all((model.alphas >= 0) & (model.alphas <= model.c))
    assert abs(np.dot(model.alphas, model.sv_labels)) < 1e-6
    assert clf.kkt_violation(model, m) <= 1e-3


@pytest.mark.parametrize("kernel,gamma,c", [("linear", None, 1.0), ("rbf", 0.5, 2.0), ("rbf", 2.0**-6, 2.0)])
def test_svm_matches_qp_oracle(kernel, gamma, c):
    m = blobs(7, n=30, dim=2, shift=0.8)
    model = clf.svm_train(m, kernel=kernel, c=c, gamma=gamma, tol=1e-6)
    kmat = clf.kernel_matrix(m.values, m.values, kernel, gamma)
    alpha_ref, bias_ref = qp_oracle(kmat, m.y, c)
    alpha = np.zeros(m.n_rows)
    alpha[model.support_indices] = model.alphas
    assert dual_objective(alpha, kmat, m.y) == pytest.approx(dual_objective(alpha_ref, kmat, m.y), abs=1e-5)
    queries = np.random.default_rng(3).standard_normal((100, 2)) * 2.0
    ref = clf.kernel_matrix(queries, m.values, kernel, gamma) @ (alpha_ref * m.y) + bias_ref
    ours = model.decision_function(queries)
    clear = np.abs(ref) > 1e-3
    assert np.array_equal(np.sign(ours[clear]), np.sign(ref[clear]))


def test_svm_support_vector_keeps_label():
    m = blobs(3, n=40, dim=2, shift=3.0)
    model = clf.svm_train(m, kernel="linear", c=5.0)
    for sv, lab in zip(model.support_vectors, model.sv_labels):
        assert clf.svm_predict(model, sv) == (DEPRESSED if lab > 0 else CONTROL)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["linear", "rbf"]), st.floats(0.1, 10.0))
def test_svm_box_and_equality_constraints(seed, kernel, c):
    m = blobs(seed, n=25, dim=3, shift=0.5)
    model = clf.svm_train(m, kernel=kernel, c=c, gamma=0.3)
    assert np.all((model.alphas > 0) & (model.alphas <= c))
    assert abs(np.dot(model.alphas, model.sv_labels)) < 1e-6
    assert clf.kkt_violation(model, m) <= 1e-3 + 1e-9


def test_svm_errors():
    with pytest.raises(InvalidArgumentError):
        clf.svm_train(matrix([1.0, 2.0], [DEPRESSED, DEPRESSED]))
    m = blobs(0, n=10)
    with pytest.raises(InvalidArgumentError):
        clf.svm_train(m, c=0.0)
    with pytest.raises(InvalidArgumentError):
        clf.svm_train(m, kernel="poly")
    with pytest.raises(InvalidArgumentError):
        clf.svm_train(m, kernel="rbf", gamma=None)
    with pytest.raises(TrainingFailedError) as info:
        clf.svm_train(blobs(1, n=80, shift=0.1), kernel="rbf", c=100.0, gamma=5.0, max_iter=3)
    assert info.value.iterations == 3
    model = clf.svm_train(m)
    with pytest.raises(InvalidArgumentError):
        clf.svm_predict(model, [1.0])


# ---------------------------------------------------------------- logistic regression

def test_logreg_symmetric_pair():
    model = clf.logreg_train(matrix([-1.0, 1.0], [CONTROL, DEPRESSED]))
    assert model.weights[0] > 0 and abs(model.bias) < 1e-3


def test_logreg_useless_zero_feature():
    m = blobs(2, n=60, dim=2, shift=0.7)
    m = m.with_values(np.column_stack([m.values[:, 0], np.zeros(m.n_rows)]))
    model = clf.logreg_train(m)
    assert abs(model.weights[1]) < 1e-3


@pytest.mark.parametrize("seed", range(3))
def test_logreg_gradient_matches_finite_differences(seed):
    m = blobs(seed, n=50, dim=4, shift=0.5)
    model = clf.logreg_train(m)
    theta = np.append(model.weights, model.bias)

    def loss(th):
        return clf.logreg_objective(th[:-1], th[-1], m.values, m.y, model.l2)[0]

    h = 1e-5
    fd = np.array([(loss(theta + h * e) - loss(theta - h * e)) / (2 * h) for e in np.eye(theta.size)])
    _, gw, gb = clf.logreg_objective(model.weights, model.bias, m.values, m.y, model.l2)
    assert np.max(np.abs(np.append(gw, gb) - fd)) < 1e-6
    # also away from the optimum
    probe = theta + np.random.default_rng(seed).standard_normal(theta.size)
    fd = np.array([(loss(probe + h * e) - loss(probe - h * e)) / (2 * h) for e in np.eye(theta.size)])
    _, gw, gb = clf.logreg_objective(probe[:-1], probe[-1], m.values, m.y, model.l2)
    assert np.max(np.abs(np.append(gw, gb) - fd)) < 1e-6


def test_logreg_boundary_rule():
    model = clf.LogregModel(np.array([1.0, -1.0]), 0.0)
    assert clf.logreg_predict(model, [2.0, 2.0]) == DEPRESSED
    assert clf.logreg_predict(model, [50.0, 0.0]) == DEPRESSED
    assert clf.logreg_predict(model, [0.0, 50.0]) == CONTROL
    with pytest.raises(InvalidArgumentError):
        clf.logreg_predict(model, [1.0])


def test_logreg_nonconvergence():
    with pytest.raises(TrainingFailedError):
        clf.logreg_train(blobs(0, n=40), max_iters=1, lr_tol=1e-300)


# ---------------------------------------------------------------- dispatch + serialization

@pytest.mark.parametrize("name,params", [("knn", {"k": 3}), ("svm", {"kernel": "rbf", "c": 2.0, "gamma": 0.1}),
                                         ("svm", {"kernel": "linear", "c": 1.0}), ("logreg", {"l2": 1e-3})])
def test_models_round_trip_and_are_deterministic(name, params):
    m = blobs(5, n=40, dim=3, shift=0.6)
    a = clf.fit(name, params, m)
    b = clf.fit(name, params, m)
    da, db = json.dumps(clf.model_to_dict(a)), json.dumps(clf.model_to_dict(b))
    assert da == db
    restored = clf.model_from_dict(json.loads(da))
    queries = np.random.default_rng(0).standard_normal((20, 3))
    assert [clf.predict(a, q) for q in queries] == [clf.predict(restored, q) for q in queries]


def test_unknown_classifier():
    with pytest.raises(InvalidArgumentError):
        clf.fit("tree", {}, blobs(0, n=10))
    with pytest.raises(InvalidArgumentError):
        clf.model_from_dict({"type": "tree"})
