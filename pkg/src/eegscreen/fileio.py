"""Readers and writers for recordings, manifests and feature matrices.

Recordings are headered CSV files with one column per channel and one row
per sample. The sampling rate lives in the manifest. Floats are written
with ``repr`` so that a round trip through text is exact.
"""
import csv
import io
import json
import os
from pathlib import Path

import numpy as np

from .classify import LABELS, FeatureMatrix
from .errors import InvalidArgumentError

MANIFEST_VERSION = "eegscreen.manifest/1"


class DataError(Exception):
    """A data file exists but cannot be parsed."""


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def recording_to_csv(samples, channels):
    samples = np.asarray(samples, dtype=np.float64)
    buf = io.StringIO()
    buf.write(",".join(channels) + "\n")
    for row in samples:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def write_recording(path, samples, channels):
    write_text(path, recording_to_csv(samples, channels))


def read_recording(path, channels=None):
    """Load a recording as ``(samples (n, n_channels), channel names)``.

    Raises
    ------
    DataError
        On a missing header, ragged rows, non-numeric or non-finite cells,
        or channel names that differ from ``channels``.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: cannot read ({exc})") from None
    if not rows:
        raise DataError(f"{path}: empty file")
    header = tuple(h.strip() for h in rows[0])
    if channels is not None and header != tuple(channels):
        raise DataError(f"{path}: header {list(header)} does not match channels {list(channels)}")
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no samples")
    out = np.empty((len(body), len(header)), dtype=np.float64)
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise DataError(f"{path}: line {i + 2} has {len(row)} fields, expected {len(header)}")
        try:
            out[i] = [float(v) for v in row]
        except ValueError:
            raise DataError(f"{path}: line {i + 2} holds a non-numeric value") from None
    if not np.all(np.isfinite(out)):
        raise DataError(f"{path}: non-finite sample values")
    return out, header


def manifest_dict(entries, channels):
    return {"version": MANIFEST_VERSION, "channels": list(channels), "entries": list(entries)}


def write_manifest(path, entries, channels):
    write_text(path, json.dumps(manifest_dict(entries, channels), indent=2) + "\n")


def read_manifest(path):
    """Load and validate a manifest; entry paths are resolved against its directory.

    Returns ``(entries, channels)`` where each entry is a dict with
    ``subject_id``, ``label``, ``path`` (absolute) and ``fs``.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read manifest {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"manifest {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("version") != MANIFEST_VERSION:
        raise InvalidArgumentError(f"manifest {path} must be an object with version {MANIFEST_VERSION!r}")
    channels = doc.get("channels")
    if not isinstance(channels, list) or not channels or not all(isinstance(c, str) for c in channels):
        raise InvalidArgumentError(f"manifest {path}: 'channels' must be a nonempty list of names")
    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        raise InvalidArgumentError(f"manifest {path} lists no entries")
    seen = set()
    out = []
    for k, e in enumerate(entries):
        if not isinstance(e, dict) or not {"subject_id", "label", "path", "fs"} <= set(e):
            raise InvalidArgumentError(f"manifest entry {k} needs subject_id, label, path and fs")
        sid = str(e["subject_id"])
        if sid in seen:
            raise InvalidArgumentError(f"manifest repeats subject_id {sid!r}")
        seen.add(sid)
        if e["label"] not in LABELS:
            raise InvalidArgumentError(f"manifest entry {sid!r}: label must be one of {LABELS}")
        fs = e["fs"]
        if isinstance(fs, bool) or not isinstance(fs, (int, float)) or not fs > 0:
            raise InvalidArgumentError(f"manifest entry {sid!r}: fs must be a positive number")
        full = (path.parent / e["path"]).resolve()
        if not full.is_file():
            raise InvalidArgumentError(f"manifest entry {sid!r}: file {full} does not exist")
        out.append({"subject_id": sid, "label": e["label"], "path": str(full), "fs": float(fs)})
    return out, tuple(channels)


def features_to_csv(m):
    """Feature CSV text: ``subject_id,label`` then feature columns, rows sorted by id."""
    order = sorted(range(m.n_rows), key=lambda i: m.subject_ids[i])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["subject_id", "label", *m.feature_names])
    for i in order:
        w.writerow([m.subject_ids[i], m.labels[i], *(repr(float(v)) for v in m.values[i])])
    return buf.getvalue()


def write_features(path, m):
    write_text(path, features_to_csv(m))


def read_features(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read feature file {path}: {exc}") from None
    if not rows or rows[0][:2] != ["subject_id", "label"]:
        raise InvalidArgumentError(f"{path}: header must start with 'subject_id,label'")
    names = rows[0][2:]
    ids, labels, values = [], [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(names) + 2:
            raise InvalidArgumentError(f"{path}: line {n} has {len(row)} fields, expected {len(names) + 2}")
        ids.append(row[0])
        labels.append(row[1])
        try:
            values.append([float(v) for v in row[2:]])
        except ValueError:
            raise InvalidArgumentError(f"{path}: line {n} holds a non-numeric feature") from None
    if not ids:
        raise InvalidArgumentError(f"{path}: no feature rows")
    return FeatureMatrix(np.array(values, dtype=np.float64).reshape(len(ids), len(names)), labels, names, ids)


def ensure_dir(path):
    """Create ``path`` (and parents); raise ``InvalidArgumentError`` if it is not writable."""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot create output directory {path}: {exc}") from None
    if not os.access(path, os.W_OK):
        raise InvalidArgumentError(f"output directory {path} is not writable")
    return path
