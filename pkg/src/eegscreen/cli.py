"""Command-line front end: ``eegscreen {synth,extract,classify,pipeline}``.

Exit codes: 0 on success, 1 on a runtime or data error, 2 on a usage or
validation error.
"""
import argparse
import hashlib
import json
import logging
import platform
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import classify as clf
from . import config as config_mod
from . import fileio
from . import kernels
from .errors import EEGScreenError, InvalidArgumentError
from .evaluation import group_summary, grid_search
from .pipeline import DISPLAY_NAMES, extract_subjects, resolve_feature_set, select_features
from .synth import synth_cohort

log = logging.getLogger("eegscreen")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p, need_out=True):
    p.add_argument("--config", help="YAML file of 'section.key: value' overrides")
    p.add_argument("--preset", choices=config_mod.PRESET_NAMES, help="start from a checked-in preset")
    p.add_argument("--seed", type=int, help="overrides run.seed")
    p.add_argument("--jobs", type=int, help="parallel worker processes (overrides run.jobs)")
    p.add_argument("--out", required=need_out, help="output directory")


def _add_extract(p):
    p.add_argument("--feature-set", help="paper-knn-12, paper-svm-18 or a comma-separated list")
    p.add_argument("--strict", action="store_true", default=None, help="exit 1 if any subject is skipped")


def _add_classify(p):
    p.add_argument("--feature-set", help="paper-knn-12, paper-svm-18 or a comma-separated list")
    p.add_argument("--normalize", choices=("fold", "global"), help="z-score per training fold or once globally")


def build_parser():
    parser = _Parser(prog="eegscreen", description="EEG depression-screening feature pipeline")
    parser.add_argument("--version", action="version", version=f"eegscreen {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="write a synthetic labeled cohort")
    _add_common(p)

    p = sub.add_parser("extract", help="compute the feature matrix for a manifest")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    _add_extract(p)

    p = sub.add_parser("classify", help="grid search and leave-one-out evaluation")
    _add_common(p)
    p.add_argument("--features", required=True, help="feature CSV written by 'extract'")
    _add_classify(p)

    p = sub.add_parser("pipeline", help="synth, extract and classify in one run")
    _add_common(p)
    p.add_argument("--feature-set", help="paper-knn-12, paper-svm-18 or a comma-separated list")
    p.add_argument("--strict", action="store_true", default=None, help="exit 1 if any subject is skipped")
    p.add_argument("--normalize", choices=("fold", "global"))
    return parser


def resolve_config(args):
    cfg = config_mod.preset(args.preset) if args.preset else config_mod.PipelineConfig()
    if args.config:
        cfg = config_mod.load(args.config, cfg)
    return cfg.override(
        run_seed=args.seed,
        run_jobs=args.jobs,
        features_set=getattr(args, "feature_set", None),
        eval_normalize=getattr(args, "normalize", None),
        run_strict=getattr(args, "strict", None),
    )


def _versions():
    import numba
    import pywt
    import scipy

    return {
        "eegscreen": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pywt": pywt.__version__,
        "numba": numba.__version__,
    }


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_synth(cfg, out):
    out = fileio.ensure_dir(out)
    cohort = synth_cohort(cfg.cohort_spec())
    entries = []
    for sid, lab, rec in zip(cohort.subject_ids, cohort.labels, cohort.recordings):
        name = f"{sid}.csv"
        fileio.write_recording(out / name, rec, cohort.channels)
        entries.append({"subject_id": sid, "label": lab, "path": name, "fs": cohort.fs})
    fileio.write_manifest(out / "manifest.json", entries, cohort.channels)
    fileio.write_text(out / "synth_config.yaml", cfg.to_yaml())
    log.info("wrote %d recordings to %s", len(entries), out)
    return out / "manifest.json"


def run_extract(cfg, manifest, out):
    """Returns the exit code; writes ``features.csv`` and ``run_meta.json``."""
    entries, channels = fileio.read_manifest(manifest)
    features = resolve_feature_set(cfg.features_set)
    out = fileio.ensure_dir(out)
    recordings, skipped, kept = [], [], []
    for e in entries:
        try:
            data, _ = fileio.read_recording(e["path"], channels)
        except fileio.DataError as exc:
            skipped.append((e["subject_id"], str(exc)))
            continue
        kept.append(e)
        recordings.append(data)
    m, failed = extract_subjects(
        recordings, [e["label"] for e in kept], [e["subject_id"] for e in kept], channels,
        [e["fs"] for e in kept], cfg, features, jobs=cfg.run_jobs,
    )
    skipped = sorted(skipped + failed)
    for sid, reason in skipped:
        log.warning("skipped %s: %s", sid, reason)
    meta = {
        "schema": "eegscreen.run_meta/1",
        "command": "extract",
        "config": cfg.to_flat(),
        "config_hash": cfg.digest(),
        "manifest_sha256": _sha256(manifest),
        "versions": _versions(),
        "backend": kernels.BACKEND,
        "feature_set": list(features),
        "n_subjects": 0 if m is None else m.n_rows,
        "skipped": [{"subject_id": s, "reason": r} for s, r in skipped],
    }
    fileio.write_text(out / "run_meta.json", json.dumps(meta, indent=2) + "\n")
    if m is None:
        log.error("every subject was skipped; no feature file written")
        return EXIT_RUNTIME
    fileio.write_features(out / "features.csv", m)
    if skipped and cfg.run_strict:
        log.error("%d subject(s) skipped in strict mode", len(skipped))
        return EXIT_RUNTIME
    return EXIT_OK


def _params_text(classifier, params):
    if classifier == "knn":
        return f"k={params['k']}"
    if classifier == "svm":
        bits = [params.get("kernel", "rbf"), f"C={params['c']:g}"]
        if "gamma" in params:
            bits.append(f"gamma={params['gamma']:g}")
        return ", ".join(bits)
    return f"l2={params['l2']:g}"


def _pct(v):
    return "n/a" if v is None else f"{100.0 * v:.2f}%"


def summary_table(report, features):
    """Acc/Sen/Spe table, one row per run."""
    names = ", ".join(DISPLAY_NAMES[f] for f in features)
    head = ["Method", "Features", "Dim", "Acc", "Sen", "Spe"]
    row = [
        f"{report.classifier.upper()} ({_params_text(report.classifier, report.best_params)})",
        names,
        str(len(report.feature_set)),
        _pct(report.accuracy),
        _pct(report.sensitivity),
        _pct(report.specificity),
    ]
    widths = [max(len(a), len(b)) for a, b in zip(head, row)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([line(head), line(["-" * w for w in widths]), line(row)]) + "\n"


def run_classify(cfg, features_path, out, stream=None):
    m = fileio.read_features(features_path)
    if clf.UNKNOWN in m.labels:
        n = sum(lab == clf.UNKNOWN for lab in m.labels)
        raise InvalidArgumentError(f"{n} row(s) are labeled 'unknown'; classification needs labeled rows")
    features = resolve_feature_set(cfg.features_set)
    m = select_features(m, features)
    out = fileio.ensure_dir(out)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", clf.DegeneracyWarning)
        params, report = grid_search(m, cfg.classifier_name, cfg.grid(), cfg.eval_normalize)
        scaler = clf.zscore_fit(m)
        model = clf.fit(cfg.classifier_name, params, clf.zscore_apply(m, scaler))
    fileio.write_text(out / "report.json", report.to_json())
    fileio.write_text(out / "group_summary.csv", group_summary(m).to_csv())
    fileio.write_text(
        out / "model.json",
        json.dumps({"scaler": scaler.to_dict(), "feature_names": list(m.feature_names),
                    "model": clf.model_to_dict(model)}, indent=2) + "\n",
    )
    (stream or sys.stdout).write(summary_table(report, features))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    try:
        cfg = resolve_config(args)
        if args.command == "synth":
            run_synth(cfg, args.out)
            return EXIT_OK
        if args.command == "extract":
            return run_extract(cfg, args.manifest, args.out)
        if args.command == "classify":
            return run_classify(cfg, args.features, args.out)
        out = fileio.ensure_dir(args.out)
        manifest = run_synth(cfg, out / "recordings")
        code = run_extract(cfg, manifest, out)
        if code != EXIT_OK and not (out / "features.csv").exists():
            return code
        classify_code = run_classify(cfg, out / "features.csv", out)
        return code or classify_code
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EEGScreenError, fileio.DataError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
