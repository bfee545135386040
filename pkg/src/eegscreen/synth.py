"""Seeded signal generators: Lorenz trajectories, white/pink noise, labeled cohorts.

All randomness comes from numpy's PCG64 generator (``np.random.default_rng``).
Cohort subjects draw from ``default_rng([seed, subject_index])`` so each
subject's stream is independent of how many others are generated, or in
which order.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import IntegrationFailedError, InvalidArgumentError
from .signal_core import TimeSeries

DEPRESSED = "depressed"
CONTROL = "control"
CHANNELS = ("Fp1", "Fpz", "Fp2")
EFFECT_KEYS = ("rhythm", "power", "peak")


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt: float = 0.01
    n: int = 50000
    transient: int = 1000
    initial: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        if int(self.n) != self.n or self.n <= 0:
            raise InvalidArgumentError(f"n must be a positive integer, got {self.n}")
        if int(self.transient) != self.transient or self.transient < 0:
            raise InvalidArgumentError(f"transient must be a nonnegative integer, got {self.transient}")
        if len(self.initial) != 3:
            raise InvalidArgumentError("initial state needs three components")


def lorenz(p=None):
    """x-component of a fixed-step RK4 Lorenz trajectory, transient discarded."""
    p = p or LorenzParams()
    state = np.asarray(p.initial, dtype=np.float64)
    x = kernels.lorenz_rk4(state, float(p.sigma), float(p.rho), float(p.beta), float(p.dt), int(p.n), int(p.transient))
    if not np.all(np.isfinite(x)):
        raise IntegrationFailedError("Lorenz integration diverged; reduce dt")
    return TimeSeries(x, 1.0 / p.dt, "lorenz-x")


def _pink_from_white(white):
    n = white.size
    spec = np.fft.rfft(white)
    f = np.fft.rfftfreq(n)
    spec[0] = 0.0
    spec[1:] /= np.sqrt(f[1:])
    out = np.fft.irfft(spec, n)
    return out / out.std()


def noise(kind="white", n=10000, seed=0, fs=250.0):
    """Unit-variance Gaussian noise; ``pink`` shapes the spectrum to 1/f."""
    if int(n) != n or n <= 0:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    if kind not in ("white", "pink"):
        raise InvalidArgumentError(f"noise kind must be 'white' or 'pink', got {kind!r}")
    white = np.random.default_rng(seed).standard_normal(int(n))
    samples = white if kind == "white" else _pink_from_white(white)
    return TimeSeries(samples, fs, f"{kind}-noise")


def narrowband(rng, n, fs, f0, bandwidth):
    """Unit-variance Gaussian process with a Gaussian-shaped spectral peak at ``f0``."""
    spec = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, d=1.0 / fs)
    spec *= np.exp(-0.5 * ((f - f0) / bandwidth) ** 2)
    out = np.fft.irfft(spec, n)
    return out / out.std()


def blink_train(n, fs, centers_s, width_s=0.12, amplitude=1.0):
    """Sum of Gaussian bumps, a crude stand-in for eye blinks on frontal leads."""
    t = np.arange(n) / fs
    out = np.zeros(n)
    for c in centers_s:
        out += amplitude * np.exp(-0.5 * ((t - c) / width_s) ** 2)
    return out


@dataclass(frozen=True)
class CohortSpec:
    """Shape and group effect of a synthetic cohort.

    ``effect`` shifts the depressed group's latent generative parameters,
    in units of their between-subject standard deviation:

    ``rhythm``
        regularity of the dominant rhythm (stronger, narrower spectral peak);
    ``power``
        overall log amplitude;
    ``peak``
        frequency of the dominant rhythm.

    Features are monotone in these latents, so an effect of 3 separates the
    groups by roughly three standard deviations; all zeros gives a null
    cohort where labels carry no information.
    """

    n_depressed: int = 18
    n_control: int = 25
    fs: float = 250.0
    duration_s: float = 40.0
    channels: tuple = CHANNELS
    effect: dict = field(default_factory=lambda: {"rhythm": 1.5, "power": 0.5, "peak": 0.0})
    seed: int = 0
    blink_rate_hz: float = 0.1

    def __post_init__(self):
        if self.n_depressed < 1 or self.n_control < 1:
            raise InvalidArgumentError("each group needs at least one subject")
        if not (self.fs > 0 and self.duration_s > 0):
            raise InvalidArgumentError("fs and duration_s must be positive")
        if len(self.channels) < 1 or len(set(self.channels)) != len(self.channels):
            raise InvalidArgumentError("channels must be nonempty and unique")
        unknown = set(self.effect) - set(EFFECT_KEYS)
        if unknown:
            raise InvalidArgumentError(f"unknown effect keys {sorted(unknown)}; expected {EFFECT_KEYS}")
        if self.blink_rate_hz < 0:
            raise InvalidArgumentError("blink_rate_hz must be nonnegative")

    @property
    def n_samples(self):
        return int(round(self.fs * self.duration_s))

    @property
    def n_subjects(self):
        return self.n_depressed + self.n_control


@dataclass(frozen=True, eq=False)
class Cohort:
    subject_ids: tuple
    labels: tuple
    recordings: tuple  # (n_samples, n_channels) per subject
    channels: tuple
    fs: float
    latents: tuple

    def manifest_entries(self):
        return [
            {"subject_id": sid, "label": lab, "fs": self.fs}
            for sid, lab in zip(self.subject_ids, self.labels)
        ]


def _subject(spec, index, depressed):
    rng = np.random.default_rng([spec.seed, index])
    shift = {k: (float(spec.effect.get(k, 0.0)) if depressed else 0.0) for k in EFFECT_KEYS}
    z_r = rng.standard_normal() + shift["rhythm"]
    z_p = rng.standard_normal() + shift["power"]
    z_f = rng.standard_normal() + shift["peak"]

    n, fs = spec.n_samples, spec.fs
    with np.errstate(over="ignore"):
        # absurd effects overflow here; the finiteness check below reports them
        ratio = np.exp(0.5 * z_r)
        bandwidth = float(np.clip(1.5 * np.exp(-0.4 * z_r), 0.1, 8.0))
        gain = 15.0 * np.exp(0.25 * z_p)
    f0 = float(np.clip(10.0 + 0.8 * z_f, 6.0, 14.0))

    shared_rhythm = narrowband(rng, n, fs, f0, bandwidth)
    shared_bg = _pink_from_white(rng.standard_normal(n))
    t = np.arange(n) / fs
    n_blinks = rng.poisson(spec.blink_rate_hz * spec.duration_s)
    blink_times = np.sort(rng.uniform(1.0, max(1.0, spec.duration_s - 1.0), size=n_blinks))
    blinks = blink_train(n, fs, blink_times, amplitude=6.0)
    drift_phase, mains_phase = rng.uniform(0, 2 * np.pi, size=2)

    if not np.isfinite(ratio * gain):
        raise InvalidArgumentError("effect sizes produced non-finite signals")
    channels = []
    for c in range(len(spec.channels)):
        own_rhythm = narrowband(rng, n, fs, f0, bandwidth)
        own_bg = _pink_from_white(rng.standard_normal(n))
        brain = ratio * (0.9 * shared_rhythm + 0.45 * own_rhythm) + 0.8 * shared_bg + 0.6 * own_bg
        blink_gain = 1.15 if spec.channels[c] == "Fpz" else 1.0
        artifacts = (
            blink_gain * blinks
            + 0.3 * np.sin(2 * np.pi * 0.05 * t + drift_phase)
            + 0.2 * np.sin(2 * np.pi * 50.0 * t + mains_phase)
        )
        channels.append(gain * (brain + artifacts))
    data = np.column_stack(channels)
    if not np.all(np.isfinite(data)):
        raise InvalidArgumentError("effect sizes produced non-finite signals")
    latents = {"rhythm": float(z_r), "power": float(z_p), "peak": float(z_f)}
    return data, latents


def synth_cohort(spec=None):
    """Labeled synthetic cohort; depressed subjects come first (``sub-001`` ...)."""
    spec = spec or CohortSpec()
    ids, labels, recs, latents = [], [], [], []
    for index in range(spec.n_subjects):
        depressed = index < spec.n_depressed
        data, lat = _subject(spec, index, depressed)
        ids.append(f"sub-{index + 1:03d}")
        labels.append(DEPRESSED if depressed else CONTROL)
        recs.append(data)
        latents.append(lat)
    return Cohort(tuple(ids), tuple(labels), tuple(recs), tuple(spec.channels), float(spec.fs), tuple(latents))
