"""Base signal representations: amplitude spectrum, PSD, autocorrelation.

Each transform returns an IndexedSequence: an (xs, ys) pair tagged with
its kind. xs is frequency in Hz for FFT/PSD and lag index for ACF.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import TransformError

DEFAULT_MAX_LAG = 5000
DEFAULT_PSD_SEGMENTS = 8


class Kind(enum.Enum):
    FFT = "fft"
    PSD = "psd"
    ACF = "acf"


@dataclass(frozen=True)
class IndexedSequence:
    xs: np.ndarray
    ys: np.ndarray
    kind: Kind
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "xs", np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "ys", np.asarray(self.ys, dtype=float))
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise TransformError("xs/ys must have equal length >= 2")
        if np.any(np.diff(self.xs) <= 0):
            raise TransformError("xs must be strictly increasing")
        self.xs.setflags(write=False)
        self.ys.setflags(write=False)

    def __len__(self):
        return len(self.xs)


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def amplitude_spectrum(ts):
    """One-sided magnitude spectrum of the mean-removed signal.

    Zero-pads to the next power of two; ys are raw |DFT| magnitudes (the
    padded length is recorded in meta for energy bookkeeping).
    """
    x = ts.samples
    if x.size < 4:
        raise TransformError(f"need at least 4 samples, got {x.size}")
    x = x - x.mean()
    nfft = _next_pow2(x.size)
    ys = np.abs(np.fft.rfft(x, nfft))
    xs = np.fft.rfftfreq(nfft, d=1.0 / ts.sample_rate_hz)
    return IndexedSequence(
        xs, ys, Kind.FFT, meta={"nfft": nfft, "n_samples": int(x.size)}
    )


def spectral_energy(seq):
    """Time-domain energy implied by a one-sided magnitude spectrum."""
    if seq.kind is not Kind.FFT:
        raise TransformError("spectral_energy expects an FFT sequence")
    nfft = seq.meta["nfft"]
    w = np.full(len(seq.ys), 2.0)
    w[0] = 1.0
    if nfft % 2 == 0:
        w[-1] = 1.0  # Nyquist bin is not mirrored
    return float(np.sum(w * seq.ys**2) / nfft)


def power_spectral_density(ts, nperseg=None):
    """Welch PSD: Hann window, 50% overlap, 8 segments by default."""
    x = ts.samples
    if nperseg is None:
        # segment length giving DEFAULT_PSD_SEGMENTS half-overlapping segments
        nperseg = max(8, 2 * x.size // (DEFAULT_PSD_SEGMENTS + 1))
    if x.size < nperseg:
        raise TransformError(
            f"signal of {x.size} samples shorter than one segment ({nperseg})"
        )
    xs, ys = signal.welch(
        x,
        fs=ts.sample_rate_hz,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
        scaling="density",
    )
    return IndexedSequence(xs, ys, Kind.PSD, meta={"nperseg": int(nperseg)})


def autocorrelation(ts, max_lag=None):
    """Biased, lag-0-normalized ACF of the mean-removed signal.

    Computed via FFT; equal to (1/N) sum_t x[t] x[t+k] divided by the
    lag-0 value, which keeps |ys| <= 1.
    """
    x = ts.samples
    n = x.size
    if max_lag is None:
        max_lag = min(n - 1, DEFAULT_MAX_LAG)
    if not 0 < max_lag < n:
        raise TransformError(f"max_lag {max_lag} out of range (0, {n})")
    x = x - x.mean()
    nfft = _next_pow2(2 * n)
    spec = np.fft.rfft(x, nfft)
    r = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    if r[0] <= 0:
        raise TransformError("constant signal has no defined autocorrelation")
    ys = r / r[0]
    xs = np.arange(max_lag + 1, dtype=float)
    return IndexedSequence(xs, ys, Kind.ACF, meta={"n_samples": int(n)})
