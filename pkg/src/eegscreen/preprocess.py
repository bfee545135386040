"""Band-limiting and ocular-artifact removal.

Two stages are applied to every channel before feature extraction: a
Butterworth band limit (1-40 Hz by default) and a wavelet-domain Kalman
stage that strips slow, large excursions (blinks, eye movement) from the
deepest approximation band.

The ocular stage is a best-effort reconstruction. Only its ingredients
(discrete wavelet transform plus Kalman filtering) are known; the state
model used here is a scalar random walk tracking the slow artifact inside
the approximation coefficients, which is then subtracted.
"""
from dataclasses import dataclass

import numpy as np
import pywt
from scipy import signal as sps

from . import kernels
from .errors import InvalidArgumentError
from .signal_core import as_series

FILTER_KINDS = ("highpass", "lowpass", "bandpass")
DWT_MODES = ("periodization", "symmetric")


@dataclass(frozen=True)
class FilterSpec:
    kind: str = "bandpass"
    cutoffs: tuple = (1.0, 40.0)
    order: int = 4
    zero_phase: bool = True

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise InvalidArgumentError(f"filter kind must be one of {FILTER_KINDS}, got {self.kind!r}")
        cutoffs = tuple(float(c) for c in np.atleast_1d(self.cutoffs))
        want = 2 if self.kind == "bandpass" else 1
        if len(cutoffs) != want:
            raise InvalidArgumentError(f"{self.kind} filter needs {want} cutoff(s), got {len(cutoffs)}")
        if want == 2 and not cutoffs[0] < cutoffs[1]:
            raise InvalidArgumentError(f"bandpass cutoffs must satisfy low < high, got {cutoffs}")
        if any(c <= 0 for c in cutoffs):
            raise InvalidArgumentError(f"cutoffs must be positive, got {cutoffs}")
        if int(self.order) != self.order or self.order < 1:
            raise InvalidArgumentError(f"order must be a positive integer, got {self.order}")
        object.__setattr__(self, "cutoffs", cutoffs)

    def validate_for(self, fs):
        nyq = fs / 2.0
        if max(self.cutoffs) >= nyq:
            raise InvalidArgumentError(
                f"cutoff {max(self.cutoffs)} Hz must be below the Nyquist frequency {nyq} Hz"
            )


def design(spec, fs):
    """Second-order sections of the Butterworth filter described by ``spec``."""
    spec.validate_for(fs)
    wn = spec.cutoffs if spec.kind == "bandpass" else spec.cutoffs[0]
    return sps.butter(spec.order, wn, btype=spec.kind, fs=fs, output="sos")


def bandlimit(x, spec=None):
    x = as_series(x)
    spec = spec or FilterSpec()
    sos = design(spec, x.fs)
    if not spec.zero_phase:
        return x.replace(sps.sosfilt(sos, x.samples))
    total_order = spec.order * (2 if spec.kind == "bandpass" else 1)
    padlen = min(3 * total_order, len(x) - 1)
    y = sps.sosfiltfilt(sos, x.samples, padtype="even", padlen=padlen)
    return x.replace(y)


@dataclass(frozen=True, eq=False)
class WaveletCoeffs:
    """Multilevel DWT coefficients.

    ``details[0]`` belongs to the deepest level (same band neighbour as
    ``approximation``) and ``details[-1]`` to level 1, the finest.
    """

    approximation: np.ndarray
    details: tuple
    wavelet: str
    levels: int
    length: int
    fs: float = 250.0
    mode: str = "periodization"

    def as_list(self):
        return [self.approximation, *self.details]


def _check_levels(n, levels):
    if int(levels) != levels or levels < 1:
        raise InvalidArgumentError(f"levels must be a positive integer, got {levels}")
    if 2**levels > n:
        raise InvalidArgumentError(f"2**levels = {2**levels} exceeds signal length {n}")


def dwt_decompose(x, wavelet="db4", levels=5, mode="periodization"):
    """Multilevel DWT.

    ``periodization`` (the default) makes the transform orthogonal for
    orthogonal wavelets, so coefficient energy equals signal energy for
    dyadic lengths; ``symmetric`` pads by mirroring and yields slightly more
    coefficients than samples.
    """
    x = as_series(x)
    _check_levels(len(x), levels)
    if mode not in DWT_MODES:
        raise InvalidArgumentError(f"mode must be one of {DWT_MODES}, got {mode!r}")
    try:
        w = pywt.Wavelet(wavelet)
    except ValueError as exc:
        raise InvalidArgumentError(str(exc)) from None
    coeffs = pywt.wavedec(np.array(x.samples), w, mode=mode, level=levels)
    return WaveletCoeffs(coeffs[0], tuple(coeffs[1:]), wavelet, int(levels), len(x), x.fs, mode)


def _expected_lengths(c):
    lengths = []
    n = c.length
    filt = pywt.Wavelet(c.wavelet).dec_len
    for _ in range(c.levels):
        n = pywt.dwt_coeff_len(n, filt, c.mode)
        lengths.append(n)
    return [lengths[-1], *lengths[::-1]]


def dwt_reconstruct(c):
    if len(c.details) != c.levels:
        raise InvalidArgumentError(f"expected {c.levels} detail bands, got {len(c.details)}")
    got = [len(a) for a in c.as_list()]
    if got != _expected_lengths(c):
        raise InvalidArgumentError(
            f"coefficient lengths {got} inconsistent with a {c.levels}-level "
            f"{c.wavelet} transform of {c.length} samples"
        )
    y = pywt.waverec([np.asarray(a, dtype=np.float64) for a in c.as_list()], c.wavelet, mode=c.mode)
    return as_series(y[: c.length], c.fs)


@dataclass(frozen=True)
class OcularConfig:
    """Wavelet-Kalman settings.

    Process and measurement variances are given relative to the variance of
    the deepest approximation coefficients: ``q = q_scale * var(a)``,
    ``R = r_scale * var(a)``. With ``smooth`` (default) the forward filter
    is followed by a Rauch-Tung-Striebel backward pass, which removes the
    lag of the forward estimate; ``smooth=False`` subtracts the causal
    filter output instead.
    """

    wavelet: str = "db4"
    levels: int = 5
    q_scale: float = 0.01
    r_scale: float = 1.0
    smooth: bool = True

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 1:
            raise InvalidArgumentError(f"levels must be >= 1, got {self.levels}")
        if not (self.q_scale > 0 and self.r_scale > 0):
            raise InvalidArgumentError("q_scale and r_scale must be positive")


def remove_ocular(x, cfg=None):
    x = as_series(x)
    cfg = cfg or OcularConfig()
    c = dwt_decompose(x, cfg.wavelet, cfg.levels)
    approx = np.asarray(c.approximation, dtype=np.float64)
    var = float(np.var(approx))
    if var == 0.0:
        return x
    q = cfg.q_scale * var
    r = cfg.r_scale * var
    track = kernels.kalman_smooth if cfg.smooth else kernels.kalman_random_walk
    trend = track(approx, q, r, float(approx[0]), r)
    cleaned = WaveletCoeffs(approx - trend, c.details, c.wavelet, c.levels, c.length, c.fs, c.mode)
    return x.replace(dwt_reconstruct(cleaned).samples)
