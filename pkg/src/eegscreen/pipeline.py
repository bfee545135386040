"""Per-channel preprocessing and feature extraction, assembled into feature rows.

Columns are channel-major: all features of the first channel, then the
second, and so on, each named ``<channel>_<feature>``.
"""
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import features_linear as fl
from . import features_nonlinear as fn
from .classify import FeatureMatrix
from .errors import EEGScreenError, InvalidArgumentError
from .preprocess import FilterSpec, OcularConfig, bandlimit, remove_ocular
from .signal_core import TimeSeries, WelchConfig, welch_psd

ALL_FEATURES = ("cd", "renyi", "c0", "pow_max", "pow_mean", "pow_center")
FEATURE_SETS = {
    "paper-knn-12": ("cd", "renyi", "c0", "pow_max"),
    "paper-svm-18": ALL_FEATURES,
}
DISPLAY_NAMES = {
    "cd": "CD",
    "renyi": "Renyi entropy",
    "c0": "C0",
    "pow_max": "Max",
    "pow_mean": "Mean",
    "pow_center": "Center",
}


def resolve_feature_set(spec):
    """Named set (``paper-knn-12``, ``paper-svm-18``) or a comma-separated feature list."""
    if isinstance(spec, (list, tuple)):
        names = tuple(spec)
    elif spec in FEATURE_SETS:
        return FEATURE_SETS[spec]
    else:
        names = tuple(s.strip() for s in str(spec).split(",") if s.strip())
    bad = [n for n in names if n not in ALL_FEATURES]
    if bad or not names:
        raise InvalidArgumentError(
            f"unknown feature set {spec!r}: use one of {sorted(FEATURE_SETS)} "
            f"or a comma-separated subset of {ALL_FEATURES}"
        )
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"feature set {spec!r} repeats a feature")
    return names


def column_names(channels, features):
    return [f"{ch}_{name}" for ch in channels for name in features]


def preprocess_channel(x, cfg):
    x = bandlimit(x, FilterSpec("bandpass", (cfg.filter_low_hz, cfg.filter_high_hz), cfg.filter_order))
    if cfg.ocular_enabled:
        x = remove_ocular(
            x, OcularConfig(cfg.ocular_wavelet, cfg.ocular_levels, cfg.ocular_q_scale, cfg.ocular_r_scale,
                            cfg.ocular_smooth)
        )
    return x


def channel_features(x, cfg, features):
    """Feature values for one preprocessed channel, keyed by feature name."""
    out = {}
    wanted = set(features)
    if wanted & {"pow_max", "pow_mean", "pow_center"}:
        psd = welch_psd(x, WelchConfig(cfg.welch_segment_len, cfg.welch_overlap, cfg.welch_window))
        out.update(fl.spectral_features(psd, cfg.spectral_band_lo, cfg.spectral_band_hi, cfg.spectral_center).as_dict())
    if "cd" in wanted:
        theiler = None if cfg.embed_theiler < 0 else cfg.embed_theiler
        est = fn.correlation_dimension(
            x, fn.EmbeddingConfig(cfg.embed_m, cfg.embed_tau, theiler), max_points=cfg.cd_max_points,
            n_radii=cfg.cd_n_radii,
        )
        out["cd"] = est.cd
    if "renyi" in wanted:
        out["renyi"] = fn.renyi_entropy(x, fn.RenyiConfig(cfg.renyi_bins, cfg.renyi_alpha))
    if "c0" in wanted:
        out["c0"] = fn.c0_complexity(x).c0
    return {name: float(out[name]) for name in features}


def subject_features(recording, channels, fs, cfg, features):
    """One feature row (channel-major) for a ``(n_samples, n_channels)`` recording."""
    recording = np.asarray(recording, dtype=np.float64)
    if recording.ndim != 2 or recording.shape[1] != len(channels):
        raise InvalidArgumentError(f"recording must have shape (n_samples, {len(channels)}), got {recording.shape}")
    row = []
    for c, ch in enumerate(channels):
        x = preprocess_channel(TimeSeries(recording[:, c], fs, ch), cfg)
        values = channel_features(x, cfg, features)
        row.extend(values[name] for name in features)
    return row


def _job(args):
    recording, channels, fs, cfg, features = args
    return subject_features(recording, channels, fs, cfg, features)


def _safe_job(args):
    try:
        return _job(args), None
    except (EEGScreenError, ValueError, FloatingPointError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _run(tasks, jobs, fn):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def extract_matrix(recordings, labels, subject_ids, channels, fs, cfg, features, jobs=1):
    """Feature matrix for many subjects; output order follows ``subject_ids`` sorted.

    ``fs`` is one sampling rate for all subjects or a sequence with one per
    subject. Any failing subject raises.
    """
    m, skipped = extract_subjects(recordings, labels, subject_ids, channels, fs, cfg, features, jobs,
                                  skip_errors=False)
    return m


def extract_subjects(recordings, labels, subject_ids, channels, fs, cfg, features, jobs=1, skip_errors=True):
    """Like :func:`extract_matrix` but subjects that fail are skipped.

    Returns
    -------
    matrix : FeatureMatrix or None
        Rows of the subjects that succeeded, sorted by id; ``None`` if none did.
    skipped : list of (subject_id, reason)
    """
    features = resolve_feature_set(features)
    n = len(subject_ids)
    rates = [float(fs)] * n if np.ndim(fs) == 0 else [float(f) for f in fs]
    if len(recordings) != n or len(labels) != n or len(rates) != n:
        raise InvalidArgumentError("recordings, labels, subject_ids and fs must have one entry per subject")
    order = sorted(range(n), key=lambda i: subject_ids[i])
    tasks = [(recordings[i], tuple(channels), rates[i], cfg, features) for i in order]
    if skip_errors:
        results = _run(tasks, jobs, _safe_job)
    else:
        results = [(row, None) for row in _run(tasks, jobs, _job)]
    kept, rows, skipped = [], [], []
    for i, (row, reason) in zip(order, results):
        if reason is None:
            kept.append(i)
            rows.append(row)
        else:
            skipped.append((subject_ids[i], reason))
    if not kept:
        return None, skipped
    m = FeatureMatrix(
        np.array(rows, dtype=np.float64).reshape(len(rows), -1),
        tuple(labels[i] for i in kept),
        tuple(column_names(channels, features)),
        tuple(subject_ids[i] for i in kept),
    )
    return m, skipped


def split_column(name):
    """``"Fp1_pow_max"`` -> ``("Fp1", "pow_max")``; ``None`` for a foreign column."""
    for feat in ALL_FEATURES:
        if name.endswith("_" + feat) and len(name) > len(feat) + 1:
            return name[: -len(feat) - 1], feat
    return None


def select_features(m, features):
    """Restrict a feature matrix to ``features`` for every channel, channel-major."""
    features = resolve_feature_set(features)
    channels = []
    for name in m.feature_names:
        parts = split_column(name)
        if parts and parts[0] not in channels:
            channels.append(parts[0])
    if not channels:
        raise InvalidArgumentError("feature matrix has no '<channel>_<feature>' columns")
    return m.columns(column_names(channels, features))
