"""Signal containers, the 1/N-normalized DFT pair and Welch PSD estimation.

The forward transform carries the 1/N factor::

    X(k) = 1/N * sum_n x(n) exp(-2j pi k n / N)

so Parseval reads ``sum_k |X(k)|^2 = 1/N * sum_n |x(n)|^2`` and the inverse
is the plain sum ``x(n) = sum_k X(k) exp(2j pi k n / N)``. The same
convention is used everywhere downstream (notably by C0 complexity).
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

FORWARD_1_OVER_N = "forward-1/N"

WINDOWS = ("hamming", "hann", "rect")


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One channel of a uniformly sampled signal."""

    samples: np.ndarray
    fs: float = 250.0
    label: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise InvalidArgumentError(f"samples must be one-dimensional, got shape {samples.shape}")
        if samples.size == 0:
            raise InvalidArgumentError("samples must be nonempty")
        if np.iscomplexobj(samples):
            raise InvalidArgumentError("samples must be real-valued")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("samples contain non-finite values")
        if not (np.isfinite(self.fs) and self.fs > 0):
            raise InvalidArgumentError(f"fs must be positive, got {self.fs}")
        object.__setattr__(self, "samples", _frozen(samples, np.float64))
        object.__setattr__(self, "fs", float(self.fs))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.fs

    def replace(self, samples):
        """Same rate and label, new samples."""
        return TimeSeries(samples, self.fs, self.label)


@dataclass(frozen=True, eq=False)
class Spectrum:
    coeffs: np.ndarray
    fs: float = 250.0
    convention: str = FORWARD_1_OVER_N

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise InvalidArgumentError("spectrum coefficients must be a nonempty 1-D sequence")
        if self.convention != FORWARD_1_OVER_N:
            raise InvalidArgumentError(f"unsupported normalization convention {self.convention!r}")
        object.__setattr__(self, "coeffs", _frozen(coeffs, np.complex128))

    def __len__(self):
        return self.coeffs.shape[0]

    @property
    def freqs(self):
        return np.fft.fftfreq(len(self), d=1.0 / self.fs)


@dataclass(frozen=True, eq=False)
class Psd:
    freqs: np.ndarray
    power: np.ndarray
    resolution: float

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.float64)
        power = np.asarray(self.power, dtype=np.float64)
        if freqs.shape != power.shape or freqs.ndim != 1 or freqs.size == 0:
            raise InvalidArgumentError("freqs and power must be matching nonempty 1-D arrays")
        if freqs[0] != 0.0 or np.any(np.diff(freqs) <= 0):
            raise InvalidArgumentError("freqs must start at 0 and be strictly ascending")
        if not np.all(np.isfinite(power)) or np.any(power < 0):
            raise InvalidArgumentError("power must be finite and nonnegative")
        object.__setattr__(self, "freqs", _frozen(freqs, np.float64))
        object.__setattr__(self, "power", _frozen(power, np.float64))


@dataclass(frozen=True)
class WelchConfig:
    """Welch parameters. Defaults: 2 s Hamming segments at 250 Hz, 50% overlap."""

    segment_len: int = 500
    overlap: float = 0.5
    window: str = "hamming"

    def __post_init__(self):
        if int(self.segment_len) != self.segment_len or self.segment_len < 8:
            raise InvalidArgumentError(f"segment_len must be an integer >= 8, got {self.segment_len}")
        if not 0.0 <= self.overlap < 1.0:
            raise InvalidArgumentError(f"overlap must lie in [0, 1), got {self.overlap}")
        if self.window not in WINDOWS:
            raise InvalidArgumentError(f"window must be one of {WINDOWS}, got {self.window!r}")


def as_series(x, fs=250.0):
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(np.asarray(x, dtype=np.float64), fs)


def fft(x):
    """Forward DFT with the 1/N factor; any length, no zero padding."""
    x = as_series(x)
    return Spectrum(np.fft.fft(x.samples, norm="forward"), x.fs)


def inverse_dft(s):
    """Complex inverse of :func:`fft` (plain sum, no 1/N)."""
    if not isinstance(s, Spectrum):
        s = Spectrum(np.asarray(s))
    return np.fft.ifft(s.coeffs, norm="forward")


def ifft(s):
    """Inverse of :func:`fft` as a real :class:`TimeSeries`.

    The imaginary part is discarded; it is at rounding level whenever ``s``
    is conjugate-symmetric (use :func:`inverse_dft` to inspect it).
    """
    if not isinstance(s, Spectrum):
        s = Spectrum(np.asarray(s))
    return TimeSeries(inverse_dft(s).real, s.fs)


def window_values(name, n):
    # periodic windows, as is usual for spectral estimation
    if name == "rect":
        return np.ones(n)
    k = np.arange(n)
    if name == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / n)
    if name == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / n)
    raise InvalidArgumentError(f"unknown window {name!r}")


def welch_psd(x, cfg=None):
    """One-sided power spectral density by Welch's averaged periodogram.

    Each segment is mean-removed and windowed; the periodogram is scaled by
    ``1 / (fs * sum(w**2))`` (density scaling) and interior bins doubled, so
    integrating the PSD returns the signal variance and a pure tone puts its
    peak at its own frequency bin.
    """
    x = as_series(x)
    cfg = cfg or WelchConfig()
    n = len(x)
    seg = int(cfg.segment_len)
    if seg > n:
        raise InvalidArgumentError(f"segment_len {seg} exceeds signal length {n}")
    step = seg - int(np.floor(cfg.overlap * seg))
    starts = np.arange(0, n - seg + 1, step)
    win = window_values(cfg.window, seg)
    frames = x.samples[starts[:, None] + np.arange(seg)[None, :]]
    frames = frames - frames.mean(axis=1, keepdims=True)
    spec = np.fft.rfft(frames * win, axis=1)
    power = (spec.real**2 + spec.imag**2).mean(axis=0) / (x.fs * np.sum(win**2))
    if seg % 2 == 0:
        power[1:-1] *= 2.0
    else:
        power[1:] *= 2.0
    freqs = np.fft.rfftfreq(seg, d=1.0 / x.fs)
    return Psd(freqs, power, x.fs / seg)
