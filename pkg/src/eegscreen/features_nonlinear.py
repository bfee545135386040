"""Nonlinear features: correlation dimension, Renyi entropy, C0 complexity.

Correlation dimension follows Grassberger-Procaccia: delay-embed the
series, count the fraction of vector pairs closer than ``r`` over a grid of
radii, and take the slope of ``ln C(r)`` against ``ln r`` over the most
linear stretch of the curve.

Conventions worth knowing:

* the pair sum runs over unordered pairs ``i < j`` and is normalized by the
  number of counted pairs, so ``C(r)`` lies in ``[0, 1]``;
* the step function is closed, ``theta(0) = 1``: a pair at distance exactly
  ``r`` counts;
* pairs closer than the Theiler window in time are excluded (window 0
  disables the exclusion);
* Renyi entropy uses the natural logarithm.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateInputError, EstimationFailedError, InvalidArgumentError
from .signal_core import as_series, fft, inverse_dft

FEATURE_NAMES = ("cd", "renyi", "c0")


@dataclass(frozen=True)
class EmbeddingConfig:
    """Delay-embedding parameters.

    ``tau=0`` selects the delay from the data (:func:`select_delay`);
    ``theiler_w=None`` sets the Theiler window equal to the delay.
    """

    m: int = 10
    tau: int = 0
    theiler_w: int = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise InvalidArgumentError(f"embedding dimension m must be >= 2, got {self.m}")
        if int(self.tau) != self.tau or self.tau < 0:
            raise InvalidArgumentError(f"tau must be a nonnegative integer (0 = auto), got {self.tau}")
        if self.theiler_w is not None and (int(self.theiler_w) != self.theiler_w or self.theiler_w < 0):
            raise InvalidArgumentError(f"theiler_w must be a nonnegative integer, got {self.theiler_w}")


@dataclass(frozen=True, eq=False)
class EmbeddedSeries:
    vectors: np.ndarray
    m: int
    tau: int

    @property
    def count(self):
        return self.vectors.shape[0]


@dataclass(frozen=True, eq=False)
class CorrelationCurve:
    r_values: np.ndarray
    c_values: np.ndarray
    M: int
    n_pairs: int


@dataclass(frozen=True, eq=False)
class CdEstimate:
    cd: float
    fit_lo: int
    fit_hi: int
    r_squared: float
    curve: CorrelationCurve
    tau: int
    m: int


@dataclass(frozen=True)
class RenyiConfig:
    k_bins: int = 100
    alpha: float = 2.0

    def __post_init__(self):
        if int(self.k_bins) != self.k_bins or self.k_bins < 2:
            raise InvalidArgumentError(f"k_bins must be an integer >= 2, got {self.k_bins}")
        if not (np.isfinite(self.alpha) and self.alpha > 0) or self.alpha == 1:
            raise InvalidArgumentError(f"alpha must be positive and different from 1, got {self.alpha}")


@dataclass(frozen=True, eq=False)
class AmplitudeHistogram:
    edges: np.ndarray
    probs: np.ndarray


@dataclass(frozen=True)
class C0Breakdown:
    g_n: float
    regular_energy: float
    random_energy: float
    total_energy: float
    c0: float
    degenerate: bool = False


C0_TIE_RTOL = 1e-12


def autocorrelation(x, max_lag):
    """Biased sample autocorrelation ``r(k) = sum x_t x_{t+k} / sum x_t^2`` of the demeaned series."""
    v = np.asarray(x, dtype=np.float64)
    v = v - v.mean()
    n = v.size
    size = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(v, size)
    acov = np.fft.irfft(spec.real**2 + spec.imag**2, size)[: max_lag + 1]
    return acov / acov[0]


def select_delay(x, m=10):
    """First lag at which the autocorrelation drops below 1/e.

    Clamped to ``[1, N // (4 m)]``; a series that never decorrelates gets the
    upper clamp.
    """
    x = as_series(x)
    n = len(x)
    if n < 100:
        raise InvalidArgumentError(f"delay selection needs at least 100 samples, got {n}")
    if np.ptp(x.samples) == 0.0:
        raise DegenerateInputError("cannot select a delay for a constant signal")
    upper = max(1, n // (4 * m))
    acf = autocorrelation(x.samples, upper)
    below = np.flatnonzero(acf[1:] < np.exp(-1.0))
    lag = int(below[0]) + 1 if below.size else upper
    return min(max(lag, 1), upper)


def embed(x, cfg=None):
    """Delay vectors ``X(i) = (x(i), x(i + tau), ..., x(i + (m-1) tau))``.

    Returns exactly ``N - (m - 1) tau`` vectors, one per row.
    """
    x = as_series(x)
    cfg = cfg or EmbeddingConfig()
    tau = cfg.tau or select_delay(x, cfg.m)
    span = (cfg.m - 1) * tau
    if span >= len(x):
        raise InvalidArgumentError(f"(m - 1) * tau = {span} must be smaller than the series length {len(x)}")
    windows = np.lib.stride_tricks.sliding_window_view(x.samples, span + 1)[:, ::tau]
    return EmbeddedSeries(np.ascontiguousarray(windows), cfg.m, tau)


def correlation_integral(e, r_grid, theiler_w=0, times=None):
    """Correlation sum ``C(r)`` for every radius of ``r_grid``.

    ``times`` gives the time index of each vector (defaults to ``0..M-1``)
    and is what the Theiler window is measured against; pass the original
    indices when ``e`` is a subsample.
    """
    vectors = e.vectors if isinstance(e, EmbeddedSeries) else np.asarray(e, dtype=np.float64)
    vectors = np.ascontiguousarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise InvalidArgumentError("embedded vectors must form a 2-D array")
    r = np.asarray(r_grid, dtype=np.float64)
    if r.ndim != 1 or r.size == 0 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise InvalidArgumentError("r_grid must be a nonempty, strictly ascending sequence of positive radii")
    m = vectors.shape[0]
    t = np.arange(m, dtype=np.int64) if times is None else np.asarray(times, dtype=np.int64)
    if t.shape != (m,):
        raise InvalidArgumentError("times must give one index per vector")
    counts, total = kernels.pair_counts(vectors, t, r, int(theiler_w))
    if m < 2 or total == 0:
        raise DegenerateInputError("fewer than two vectors remain after Theiler exclusion")
    return CorrelationCurve(r, counts / float(total), m, int(total))


def _subsample(count, max_points):
    if max_points is None or count <= max_points:
        return np.arange(count, dtype=np.int64)
    return np.round(np.linspace(0, count - 1, max_points)).astype(np.int64)


def _sampled_distances(vectors, times, theiler, n_pairs, seed):
    rng = np.random.default_rng(seed)
    m = vectors.shape[0]
    i = rng.integers(0, m, size=4 * n_pairs)
    j = rng.integers(0, m, size=4 * n_pairs)
    keep = np.abs(times[i] - times[j]) > theiler
    i, j = i[keep][:n_pairs], j[keep][:n_pairs]
    return np.sqrt(((vectors[i] - vectors[j]) ** 2).sum(axis=1))


def best_scaling_window(log_r, log_c, min_points=5):
    """Contiguous window of at least ``min_points`` maximizing the R^2 of a line fit.

    Only points with finite ``log_c`` are eligible. Ties go to the window
    starting at smaller ``r`` (then the shorter one). Returns
    ``(lo, hi, slope, r_squared)`` with inclusive indices.
    """
    usable = np.isfinite(log_c)
    best = None
    n = log_r.size
    for lo in range(n):
        for hi in range(lo + min_points - 1, n):
            if not usable[lo : hi + 1].all():
                break
            xs = log_r[lo : hi + 1]
            ys = log_c[lo : hi + 1]
            xc = xs - xs.mean()
            yc = ys - ys.mean()
            sxx = np.dot(xc, xc)
            syy = np.dot(yc, yc)
            slope = np.dot(xc, yc) / sxx
            r2 = 1.0 if syy == 0.0 else min(1.0, max(0.0, slope * np.dot(xc, yc) / syy))
            if best is None or r2 > best[3]:
                best = (lo, hi, slope, r2)
    if best is None:
        raise EstimationFailedError(f"fewer than {min_points} consecutive usable points on the correlation curve")
    return best


def correlation_dimension(x, cfg=None, max_points=2000, n_radii=24, percentiles=(1.0, 90.0), min_points=5):
    """Grassberger-Procaccia correlation dimension.

    The radius grid is logarithmic with ``n_radii`` points between the given
    percentiles of a deterministic sample of pairwise distances. At most
    ``max_points`` evenly strided embedded vectors enter the pair count.
    """
    x = as_series(x)
    cfg = cfg or EmbeddingConfig()
    if np.ptp(x.samples) == 0.0:
        raise DegenerateInputError("correlation dimension of a constant signal is undefined")
    e = embed(x, cfg)
    theiler = e.tau if cfg.theiler_w is None else cfg.theiler_w
    idx = _subsample(e.count, max_points)
    vectors = e.vectors[idx]
    dists = _sampled_distances(vectors, idx, theiler, 20000, seed=0)
    dists = dists[dists > 0]
    if dists.size == 0:
        raise DegenerateInputError("all sampled embedded vectors coincide")
    r_lo, r_hi = np.percentile(dists, percentiles)
    if not r_hi > r_lo:
        raise EstimationFailedError("pairwise distance percentiles do not span a usable radius range")
    r_grid = np.geomspace(r_lo, r_hi, n_radii)
    curve = correlation_integral(vectors, r_grid, theiler, times=idx)
    with np.errstate(divide="ignore"):
        log_c = np.log(curve.c_values)
    lo, hi, slope, r2 = best_scaling_window(np.log(r_grid), log_c, min_points)
    return CdEstimate(max(0.0, float(slope)), int(lo), int(hi), float(r2), curve, e.tau, cfg.m)


def amplitude_histogram(x, k_bins=100):
    """Occupation probabilities of ``k_bins`` equal-width bins over ``[min x, max x]``.

    Bin ``i`` holds ``lo + i w <= v < lo + (i+1) w``; the maximum goes into
    the last bin. A constant signal occupies bin 0 alone.
    """
    v = as_series(x).samples
    lo, hi = float(v.min()), float(v.max())
    counts = np.zeros(k_bins, dtype=np.int64)
    if hi == lo:
        counts[0] = v.size
        edges = lo + np.arange(k_bins + 1, dtype=np.float64)
    else:
        idx = np.floor((v - lo) / (hi - lo) * k_bins).astype(np.int64)
        np.clip(idx, 0, k_bins - 1, out=idx)
        counts = np.bincount(idx, minlength=k_bins)
        edges = np.linspace(lo, hi, k_bins + 1)
    return AmplitudeHistogram(edges, counts / float(v.size))


def renyi_from_probs(p, alpha):
    p = np.asarray(p, dtype=np.float64)
    p = p[p > 0]
    return float(np.log(np.sum(p**alpha)) / (1.0 - alpha))


def renyi_entropy(x, cfg=None):
    """Order-alpha Renyi entropy (nats) of the amplitude histogram."""
    cfg = cfg or RenyiConfig()
    hist = amplitude_histogram(x, cfg.k_bins)
    return renyi_from_probs(hist.probs, cfg.alpha)


def c0_complexity(x):
    """C0 complexity: energy fraction left after keeping only dominant spectral bins.

    Bins whose power ``|X(k)|^2`` exceeds the spectrum's mean power (by more
    than a relative ``C0_TIE_RTOL``) are kept as the regular part; everything
    else is the random part. An all-zero signal gets ``c0 = 0`` with
    ``degenerate=True``.
    """
    x = as_series(x)
    v = x.samples
    spec = fft(x).coeffs
    power = spec.real**2 + spec.imag**2
    g_n = float(power.mean())
    # bins k and N-k have equal power in exact arithmetic; deciding on their
    # average keeps conjugate pairs together, so the regular part stays real
    # and the energy partition is exact
    paired = 0.5 * (power + power[(-np.arange(power.size)) % power.size])
    # a bin that ties G_N up to rounding (flat spectra such as an impulse)
    # counts as random, so the split does not hinge on the last bit
    regular_spec = np.where(paired > g_n * (1.0 + C0_TIE_RTOL), spec, 0.0)
    y = inverse_dft(regular_spec).real
    total = float(np.sum(v * v))
    regular = float(np.sum(y * y))
    resid = v - y
    random = float(np.sum(resid * resid))
    if total == 0.0:
        return C0Breakdown(g_n, regular, random, total, 0.0, degenerate=True)
    return C0Breakdown(g_n, regular, random, total, min(1.0, random / total))
