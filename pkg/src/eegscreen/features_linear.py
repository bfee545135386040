"""Spectral summary features: peak, mean and center of the Welch PSD over a band.

"Center" defaults to the spectral centroid (power-weighted mean frequency);
``center="median"`` gives the median frequency instead, the frequency that
splits in-band power in half.
"""
from dataclasses import dataclass
import warnings

import numpy as np

from .errors import DegeneracyWarning, InvalidArgumentError

FEATURE_NAMES = ("pow_max", "pow_mean", "pow_center")
CENTER_MODES = ("centroid", "median")


@dataclass(frozen=True)
class SpectralSummary:
    max_power: float
    mean_power: float
    centroid_hz: float
    degenerate: bool = False

    def as_dict(self):
        return {"pow_max": self.max_power, "pow_mean": self.mean_power, "pow_center": self.centroid_hz}


def spectral_features(p, band_lo=1.0, band_hi=40.0, center="centroid"):
    if not band_lo < band_hi:
        raise InvalidArgumentError(f"band must satisfy band_lo < band_hi, got [{band_lo}, {band_hi}]")
    if center not in CENTER_MODES:
        raise InvalidArgumentError(f"center must be one of {CENTER_MODES}, got {center!r}")
    if band_lo < p.freqs[0] or band_hi > p.freqs[-1]:
        raise InvalidArgumentError(
            f"band [{band_lo}, {band_hi}] Hz outside the PSD range [{p.freqs[0]}, {p.freqs[-1]}] Hz"
        )
    sel = (p.freqs >= band_lo) & (p.freqs <= band_hi)
    if not sel.any():
        raise InvalidArgumentError(f"no PSD bins fall inside [{band_lo}, {band_hi}] Hz")
    f = p.freqs[sel]
    pw = p.power[sel]
    total = float(pw.sum())
    if total == 0.0:
        warnings.warn("all-zero PSD in band; center set to the band midpoint", DegeneracyWarning, stacklevel=2)
        return SpectralSummary(0.0, 0.0, 0.5 * (band_lo + band_hi), degenerate=True)
    if center == "centroid":
        c = float(np.dot(f, pw) / total)
    else:
        cum = np.cumsum(pw)
        c = float(f[np.searchsorted(cum, 0.5 * total)])
    return SpectralSummary(float(pw.max()), float(pw.mean()), c)
