import numpy as np
import pytest

from eegscreen.signal_core import TimeSeries

FS = 250.0


def direct_dft(x):
    """O(N^2) DFT with the 1/N factor on the forward transform."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return w @ x / n


def sine(freq, n=10000, fs=FS, amp=1.0, phase=0.0):
    t = np.arange(n) / fs
    return TimeSeries(amp * np.sin(2 * np.pi * freq * t + phase), fs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
