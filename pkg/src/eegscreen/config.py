"""Pipeline configuration: one flat YAML document of ``section.key`` entries.

Every key has a default, so a config file only needs the entries it
changes. Checked-in presets live in ``eegscreen/presets/``.
"""
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
import hashlib
import json

import yaml

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class PipelineConfig:
    filter_low_hz: float = 1.0
    filter_high_hz: float = 40.0
    filter_order: int = 4

    ocular_enabled: bool = True
    ocular_wavelet: str = "db4"
    ocular_levels: int = 5
    ocular_q_scale: float = 0.01
    ocular_r_scale: float = 1.0
    ocular_smooth: bool = True

    welch_segment_len: int = 500
    welch_overlap: float = 0.5
    welch_window: str = "hamming"

    spectral_band_lo: float = 1.0
    spectral_band_hi: float = 40.0
    spectral_center: str = "centroid"

    embed_m: int = 10
    embed_tau: int = 0  # 0 selects the delay from the autocorrelation
    embed_theiler: int = -1  # -1 uses the delay as the Theiler window

    cd_max_points: int = 2000
    cd_n_radii: int = 24

    renyi_bins: int = 100
    renyi_alpha: float = 2.0

    features_set: str = "paper-knn-12"

    classifier_name: str = "knn"
    classifier_k_grid: list = field(default_factory=lambda: list(range(1, 19)))
    classifier_kernel: str = "rbf"
    classifier_c_grid: list = field(default_factory=lambda: [2.0])
    classifier_gamma_grid: list = field(default_factory=lambda: [2.0**-6])
    classifier_l2: float = 1e-4

    eval_normalize: str = "fold"

    synth_n_depressed: int = 18
    synth_n_control: int = 25
    synth_fs: float = 250.0
    synth_duration_s: float = 40.0
    synth_effect_rhythm: float = 1.5
    synth_effect_power: float = 0.5
    synth_effect_peak: float = 0.0
    synth_blink_rate_hz: float = 0.1

    run_seed: int = 0
    run_jobs: int = 1
    run_strict: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        # building the module configs runs their own checks
        from .features_nonlinear import EmbeddingConfig, RenyiConfig
        from .pipeline import resolve_feature_set
        from .preprocess import FilterSpec, OcularConfig
        from .signal_core import WelchConfig
        from .synth import CohortSpec

        FilterSpec("bandpass", (self.filter_low_hz, self.filter_high_hz), self.filter_order)
        OcularConfig(self.ocular_wavelet, self.ocular_levels, self.ocular_q_scale, self.ocular_r_scale)
        WelchConfig(self.welch_segment_len, self.welch_overlap, self.welch_window)
        if not self.spectral_band_lo < self.spectral_band_hi:
            raise InvalidArgumentError("spectral.band_lo must be below spectral.band_hi")
        if self.spectral_center not in ("centroid", "median"):
            raise InvalidArgumentError("spectral.center must be 'centroid' or 'median'")
        EmbeddingConfig(self.embed_m, self.embed_tau, None if self.embed_theiler < 0 else self.embed_theiler)
        if self.cd_max_points < 10 or self.cd_n_radii < 5:
            raise InvalidArgumentError("cd.max_points must be >= 10 and cd.n_radii >= 5")
        RenyiConfig(self.renyi_bins, self.renyi_alpha)
        resolve_feature_set(self.features_set)
        if self.classifier_name not in ("knn", "svm", "logreg"):
            raise InvalidArgumentError("classifier.name must be one of knn, svm, logreg")
        if not self.classifier_k_grid or any(k < 1 for k in self.classifier_k_grid):
            raise InvalidArgumentError("classifier.k_grid must be a nonempty list of positive integers")
        if self.classifier_kernel not in ("linear", "rbf"):
            raise InvalidArgumentError("classifier.kernel must be 'linear' or 'rbf'")
        if not self.classifier_c_grid or any(c <= 0 for c in self.classifier_c_grid):
            raise InvalidArgumentError("classifier.c_grid must be a nonempty list of positive numbers")
        if not self.classifier_gamma_grid or any(g <= 0 for g in self.classifier_gamma_grid):
            raise InvalidArgumentError("classifier.gamma_grid must be a nonempty list of positive numbers")
        if self.eval_normalize not in ("fold", "global"):
            raise InvalidArgumentError("eval.normalize must be 'fold' or 'global'")
        CohortSpec(self.synth_n_depressed, self.synth_n_control, self.synth_fs, self.synth_duration_s,
                   effect=self.effect, seed=self.run_seed, blink_rate_hz=self.synth_blink_rate_hz)
        if self.run_jobs < 1:
            raise InvalidArgumentError("run.jobs must be >= 1")

    @property
    def effect(self):
        return {"rhythm": self.synth_effect_rhythm, "power": self.synth_effect_power, "peak": self.synth_effect_peak}

    def cohort_spec(self):
        from .synth import CohortSpec

        return CohortSpec(self.synth_n_depressed, self.synth_n_control, self.synth_fs, self.synth_duration_s,
                          effect=self.effect, seed=self.run_seed, blink_rate_hz=self.synth_blink_rate_hz)

    def grid(self):
        """Parameter grid for the configured classifier, in declaration order."""
        if self.classifier_name == "knn":
            return [{"k": int(k)} for k in self.classifier_k_grid]
        if self.classifier_name == "svm":
            if self.classifier_kernel == "linear":
                return [{"kernel": "linear", "c": float(c)} for c in self.classifier_c_grid]
            return [{"kernel": "rbf", "c": float(c), "gamma": float(g)}
                    for c in self.classifier_c_grid for g in self.classifier_gamma_grid]
        return [{"l2": float(self.classifier_l2)}]

    def to_flat(self):
        return {_key(name): value for name, value in asdict(self).items()}

    def to_yaml(self):
        return yaml.safe_dump(self.to_flat(), sort_keys=False, default_flow_style=None, width=1000)

    def digest(self):
        blob = json.dumps(self.to_flat(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def override(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _key(field_name):
    section, _, rest = field_name.partition("_")
    return f"{section}.{rest}"


_FIELDS = {_key(f.name): f for f in fields(PipelineConfig)}
_DEFAULTS = PipelineConfig()


def _coerce(key, value):
    expected = type(getattr(_DEFAULTS, _FIELDS[key].name))
    if expected is bool:
        if isinstance(value, bool):
            return value
    elif expected is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif expected is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif expected is str:
        if isinstance(value, str):
            return value
    elif expected is list:
        item = type(getattr(_DEFAULTS, _FIELDS[key].name)[0])
        if isinstance(value, list) and value and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            if item is int and not all(isinstance(v, int) for v in value):
                pass
            else:
                return [item(v) for v in value]
    raise InvalidArgumentError(
        f"config key {key!r}: expected {expected.__name__}"
        + (f" of {type(getattr(_DEFAULTS, _FIELDS[key].name)[0]).__name__}" if expected is list else "")
        + f", got {value!r}"
    )


def from_flat(d, base=None):
    """Build a config from ``{"section.key": value}``; unknown keys are rejected."""
    if not isinstance(d, dict):
        raise InvalidArgumentError("config document must be a mapping of 'section.key: value' entries")
    unknown = sorted(k for k in d if k not in _FIELDS)
    if unknown:
        raise InvalidArgumentError(f"unknown config key(s) {unknown}; valid keys are: {', '.join(_FIELDS)}")
    changes = {_FIELDS[k].name: _coerce(k, v) for k, v in d.items()}
    base = base or _DEFAULTS
    return replace(base, **changes)


def load_yaml(text, base=None):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InvalidArgumentError(f"config is not valid YAML: {exc}") from None
    return from_flat(doc or {}, base)


def load(path, base=None):
    with open(path, encoding="utf-8") as fh:
        return load_yaml(fh.read(), base)


PRESET_NAMES = ("paper-knn", "paper-svm", "logreg")


def preset(name):
    if name not in PRESET_NAMES:
        raise InvalidArgumentError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    text = resources.files("eegscreen.presets").joinpath(f"{name}.yaml").read_text(encoding="utf-8")
    return load_yaml(text)
