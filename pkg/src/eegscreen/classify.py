"""Feature standardization and the three classifiers: KNN, soft-margin SVM, logistic regression.

Labels are strings, ``"depressed"`` (the positive class, +1 internally) and
``"control"`` (-1). Every boundary case resolves to ``"depressed"``: a zero
SVM decision value, a logistic probability of exactly 0.5, and a KNN vote
that stays tied after comparing summed neighbour distances.
"""
from dataclasses import dataclass
import warnings

import numpy as np
from scipy.special import expit

from . import kernels
from .errors import DegeneracyWarning, InvalidArgumentError, TrainingFailedError

DEPRESSED = "depressed"
CONTROL = "control"
UNKNOWN = "unknown"
LABELS = (DEPRESSED, CONTROL, UNKNOWN)


def label_to_sign(labels):
    return np.array([1.0 if lab == DEPRESSED else -1.0 for lab in labels])


def sign_to_label(value):
    return DEPRESSED if value >= 0 else CONTROL


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    labels: tuple
    feature_names: tuple
    subject_ids: tuple = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, ndmin=2, copy=True)
        labels = tuple(self.labels)
        names = tuple(self.feature_names)
        if values.shape[0] != len(labels):
            raise InvalidArgumentError(f"{values.shape[0]} rows but {len(labels)} labels")
        if values.shape[1] != len(names):
            raise InvalidArgumentError(f"{values.shape[1]} columns but {len(names)} feature names")
        if len(set(names)) != len(names):
            raise InvalidArgumentError("feature names must be unique")
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("feature matrix contains missing or non-finite values")
        bad = sorted(set(labels) - set(LABELS))
        if bad:
            raise InvalidArgumentError(f"unknown labels {bad}; expected one of {LABELS}")
        ids = self.subject_ids
        ids = tuple(f"row-{i}" for i in range(len(labels))) if ids is None else tuple(ids)
        if len(ids) != len(labels) or len(set(ids)) != len(ids):
            raise InvalidArgumentError("subject_ids must be unique, one per row")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "subject_ids", ids)

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def y(self):
        return label_to_sign(self.labels)

    def rows(self, index):
        index = np.asarray(index, dtype=np.int64)
        return FeatureMatrix(
            self.values[index],
            tuple(self.labels[i] for i in index),
            self.feature_names,
            tuple(self.subject_ids[i] for i in index),
        )

    def with_values(self, values):
        return FeatureMatrix(values, self.labels, self.feature_names, self.subject_ids)

    def columns(self, names):
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise InvalidArgumentError(f"features not present in matrix: {missing}")
        idx = [self.feature_names.index(n) for n in names]
        return FeatureMatrix(self.values[:, idx], self.labels, tuple(names), self.subject_ids)


def _require_both_classes(m):
    present = set(m.labels)
    if not {DEPRESSED, CONTROL} <= present or UNKNOWN in present:
        raise InvalidArgumentError("training data must contain both labeled classes and no unknown labels")


# -- standardization ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScalerParams:
    means: np.ndarray
    stds: np.ndarray

    @property
    def degenerate(self):
        return self.stds == 0.0

    def to_dict(self):
        return {"means": self.means.tolist(), "stds": self.stds.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["means"], dtype=np.float64), np.asarray(d["stds"], dtype=np.float64))


def zscore_fit(m):
    """Column means and sample standard deviations (n - 1 denominator)."""
    if m.n_rows < 2:
        raise InvalidArgumentError("standardization needs at least two rows")
    return ScalerParams(m.values.mean(axis=0), m.values.std(axis=0, ddof=1))


def standardize(values, p):
    values = np.asarray(values, dtype=np.float64)
    if values.shape[-1] != p.means.shape[0]:
        raise InvalidArgumentError(f"expected {p.means.shape[0]} features, got {values.shape[-1]}")
    zero = p.stds == 0.0
    if zero.any():
        warnings.warn(f"{int(zero.sum())} zero-variance feature(s) mapped to 0", DegeneracyWarning, stacklevel=2)
    safe = np.where(zero, 1.0, p.stds)
    return np.where(zero, 0.0, (values - p.means) / safe)


def zscore_apply(m, p):
    return m.with_values(standardize(m.values, p))


# -- k nearest neighbours -----------------------------------------------------


@dataclass(frozen=True)
class KnnConfig:
    k: int = 17
    metric: str = "euclidean"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgumentError(f"k must be a positive integer, got {self.k}")
        if self.metric != "euclidean":
            raise InvalidArgumentError(f"only the euclidean metric is supported, got {self.metric!r}")


@dataclass(frozen=True, eq=False)
class KnnModel:
    train: FeatureMatrix
    config: KnnConfig


def knn_neighbors(train_values, query, k):
    """Indices and distances of the ``k`` nearest rows; distance ties go to the lower index."""
    d = np.sqrt(((np.asarray(train_values) - np.asarray(query, dtype=np.float64)) ** 2).sum(axis=1))
    order = np.lexsort((np.arange(d.size), d))[:k]
    return order, d[order]


def knn_predict(train, query, cfg=None):
    """Majority label among the ``k`` nearest training rows.

    A tied vote goes to the class whose voting neighbours have the smaller
    summed distance, and to ``depressed`` if that ties too.
    """
    cfg = cfg or KnnConfig()
    if train.n_rows == 0:
        raise InvalidArgumentError("empty training set")
    if cfg.k > train.n_rows:
        raise InvalidArgumentError(f"k = {cfg.k} exceeds the {train.n_rows} training rows")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (train.values.shape[1],):
        raise InvalidArgumentError(f"query must have {train.values.shape[1]} features, got shape {query.shape}")
    idx, dist = knn_neighbors(train.values, query, cfg.k)
    votes = {DEPRESSED: 0, CONTROL: 0}
    spread = {DEPRESSED: 0.0, CONTROL: 0.0}
    for i, d in zip(idx, dist):
        lab = train.labels[i]
        votes[lab] += 1
        spread[lab] += d
    if votes[DEPRESSED] != votes[CONTROL]:
        return DEPRESSED if votes[DEPRESSED] > votes[CONTROL] else CONTROL
    return CONTROL if spread[CONTROL] < spread[DEPRESSED] else DEPRESSED


def knn_fit(m, k=17):
    _require_both_classes(m)
    return KnnModel(m, KnnConfig(k))


# -- support vector machine ---------------------------------------------------

SVM_KERNELS = ("linear", "rbf")


def kernel_matrix(a, b, kernel, gamma=None):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if kernel == "linear":
        return a @ b.T
    if kernel == "rbf":
        sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        return np.exp(-gamma * sq)
    raise InvalidArgumentError(f"kernel must be one of {SVM_KERNELS}, got {kernel!r}")


@dataclass(frozen=True, eq=False)
class SvmModel:
    support_vectors: np.ndarray
    sv_labels: np.ndarray  # +1 depressed, -1 control
    alphas: np.ndarray
    bias: float
    kernel: str
    c: float
    gamma: float = None
    support_indices: np.ndarray = None
    iterations: int = 0

    def decision_function(self, values):
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        if values.shape[1] != self.support_vectors.shape[1]:
            raise InvalidArgumentError(
                f"expected {self.support_vectors.shape[1]} features, got {values.shape[1]}"
            )
        k = kernel_matrix(values, self.support_vectors, self.kernel, self.gamma)
        return k @ (self.alphas * self.sv_labels) + self.bias

    def to_dict(self):
        return {
            "type": "svm",
            "kernel": self.kernel,
            "c": self.c,
            "gamma": self.gamma,
            "bias": self.bias,
            "alphas": self.alphas.tolist(),
            "sv_labels": self.sv_labels.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "support_indices": None if self.support_indices is None else self.support_indices.tolist(),
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        idx = d.get("support_indices")
        return cls(
            np.asarray(d["support_vectors"], dtype=np.float64).reshape(len(d["alphas"]), -1),
            np.asarray(d["sv_labels"], dtype=np.float64),
            np.asarray(d["alphas"], dtype=np.float64),
            float(d["bias"]),
            d["kernel"],
            float(d["c"]),
            None if d.get("gamma") is None else float(d["gamma"]),
            None if idx is None else np.asarray(idx, dtype=np.int64),
            int(d.get("iterations", 0)),
        )


def svm_train(m, kernel="rbf", c=2.0, gamma=2.0**-6, tol=1e-3, max_iter=100000):
    """Train a soft-margin SVM on the dual by sequential minimal optimization.

    Each step updates the maximal violating pair (first index on ties) and
    stops once the KKT gap falls below ``tol``.
    """
    _require_both_classes(m)
    if not c > 0:
        raise InvalidArgumentError(f"C must be positive, got {c}")
    if kernel not in SVM_KERNELS:
        raise InvalidArgumentError(f"kernel must be one of {SVM_KERNELS}, got {kernel!r}")
    if kernel == "rbf":
        if gamma is None or not gamma > 0:
            raise InvalidArgumentError(f"rbf kernel needs gamma > 0, got {gamma}")
        gamma = float(gamma)
    else:
        gamma = None
    x = np.ascontiguousarray(m.values)
    y = m.y
    kmat = np.ascontiguousarray(kernel_matrix(x, x, kernel, gamma))
    alpha, bias, iters, converged = kernels.smo_solve(kmat, y, float(c), float(tol), int(max_iter))
    if not converged:
        raise TrainingFailedError("SMO did not reach the KKT tolerance", iters)
    sv = np.flatnonzero(alpha > 0)
    return SvmModel(x[sv].copy(), y[sv].copy(), alpha[sv].copy(), float(bias), kernel, float(c), gamma, sv, int(iters))


def svm_predict(model, query):
    return sign_to_label(float(model.decision_function(query)[0]))


def kkt_violation(model, m):
    """Largest KKT violation of ``model`` over its training matrix ``m``.

    For multiplier 0 the margin ``y f(x)`` must be at least 1, for free
    multipliers exactly 1, and at most 1 at the bound C.
    """
    alpha = np.zeros(m.n_rows)
    alpha[model.support_indices] = model.alphas
    margin = m.y * model.decision_function(m.values)
    at_zero = alpha <= 0
    at_c = alpha >= model.c
    free = ~(at_zero | at_c)
    viol = np.zeros(m.n_rows)
    viol[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    viol[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    viol[free] = np.abs(margin[free] - 1.0)
    return float(viol.max())


# -- logistic regression ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LogregModel:
    weights: np.ndarray
    bias: float
    l2: float = 1e-4
    iterations: int = 0

    def score(self, values):
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        if values.shape[1] != self.weights.shape[0]:
            raise InvalidArgumentError(f"expected {self.weights.shape[0]} features, got {values.shape[1]}")
        return values @ self.weights + self.bias

    def proba(self, values):
        return expit(self.score(values))

    def to_dict(self):
        return {"type": "logreg", "weights": self.weights.tolist(), "bias": self.bias, "l2": self.l2,
                "iterations": self.iterations}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["weights"], dtype=np.float64), float(d["bias"]), float(d["l2"]),
                   int(d.get("iterations", 0)))


def logreg_objective(weights, bias, values, y, l2=1e-4):
    """Mean negative log-likelihood plus ``l2/2 * |w|^2`` and its gradient.

    ``y`` holds +1/-1. Returns ``(loss, grad_w, grad_b)``.
    """
    s = values @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, -y * s)) + 0.5 * l2 * np.dot(weights, weights))
    g = -y * expit(-y * s) / y.size
    return loss, values.T @ g + l2 * weights, float(g.sum())


def logreg_train(m, max_iters=100, lr_tol=1e-8, l2=1e-4):
    """Penalized maximum likelihood by damped Newton steps."""
    _require_both_classes(m)
    x = m.values
    y = m.y
    n, p = x.shape
    xa = np.hstack([x, np.ones((n, 1))])
    theta = np.zeros(p + 1)
    ridge = np.full(p + 1, l2)
    ridge[-1] = 0.0

    def objective(th):
        loss, gw, gb = logreg_objective(th[:-1], th[-1], x, y, l2)
        return loss, np.append(gw, gb)

    loss, grad = objective(theta)
    for it in range(max_iters + 1):
        if np.linalg.norm(grad) < lr_tol:
            return LogregModel(theta[:-1].copy(), float(theta[-1]), l2, it)
        if it == max_iters:
            break
        prob = expit(xa @ theta)
        hess = (xa * (prob * (1.0 - prob) / n)[:, None]).T @ xa + np.diag(ridge) + 1e-12 * np.eye(p + 1)
        step = np.linalg.solve(hess, grad)
        t = 1.0
        while True:
            cand = theta - t * step
            cand_loss, cand_grad = objective(cand)
            if cand_loss <= loss - 1e-4 * t * np.dot(grad, step) or t < 1e-10:
                break
            t *= 0.5
        theta, loss, grad = cand, cand_loss, cand_grad
    raise TrainingFailedError(f"gradient norm {np.linalg.norm(grad):.3g} still above {lr_tol}", max_iters)


def logreg_predict(model, query):
    return DEPRESSED if float(model.proba(query)[0]) >= 0.5 else CONTROL


# -- uniform fit/predict used by the evaluation harness ----------------------

CLASSIFIERS = ("knn", "svm", "logreg")


def fit(name, params, m):
    params = dict(params)
    if name == "knn":
        return knn_fit(m, int(params.get("k", 17)))
    if name == "svm":
        return svm_train(
            m,
            kernel=params.get("kernel", "rbf"),
            c=float(params.get("c", 2.0)),
            gamma=params.get("gamma", 2.0**-6),
            tol=float(params.get("tol", 1e-3)),
        )
    if name == "logreg":
        return logreg_train(m, l2=float(params.get("l2", 1e-4)))
    raise InvalidArgumentError(f"classifier must be one of {CLASSIFIERS}, got {name!r}")


def predict(model, query):
    if isinstance(model, KnnModel):
        return knn_predict(model.train, query, model.config)
    if isinstance(model, SvmModel):
        return svm_predict(model, query)
    if isinstance(model, LogregModel):
        return logreg_predict(model, query)
    raise InvalidArgumentError(f"not a trained model: {type(model).__name__}")


def model_to_dict(model):
    if isinstance(model, KnnModel):
        return {
            "type": "knn",
            "k": model.config.k,
            "metric": model.config.metric,
            "train_values": model.train.values.tolist(),
            "train_labels": list(model.train.labels),
            "feature_names": list(model.train.feature_names),
        }
    return model.to_dict()


def model_from_dict(d):
    kind = d.get("type")
    if kind == "knn":
        train = FeatureMatrix(np.asarray(d["train_values"], dtype=np.float64), d["train_labels"], d["feature_names"])
        return KnnModel(train, KnnConfig(int(d["k"]), d.get("metric", "euclidean")))
    if kind == "svm":
        return SvmModel.from_dict(d)
    if kind == "logreg":
        return LogregModel.from_dict(d)
    raise InvalidArgumentError(f"unknown model type {kind!r}")
