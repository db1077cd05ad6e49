import numpy as np
import pytest

from chatterkit.errors import FilterDesignError
from chatterkit.preprocess import apply_filter, decimate, design_butterworth_lowpass
from chatterkit.transform import amplitude_spectrum

RATE = 160000.0


def steady_amplitude(samples, rate, order):
    """RMS-based amplitude after skipping the documented transient."""
    skip = int(10 * (order / 2) / rate * rate)
    tail = samples[skip:]
    return np.sqrt(2.0) * np.sqrt(np.mean(tail**2))


def sine(freq, rate=RATE, seconds=0.2):
    t = np.arange(int(rate * seconds)) / rate
    return np.sin(2 * np.pi * freq * t)


def test_order_100_design_has_50_stable_stages():
    spec = design_butterworth_lowpass(5000, RATE, 100)
    assert spec.n_stages == 50
    for stage in spec.sos:
        assert np.all(np.abs(np.roots(stage[3:])) < 1.0)


def test_minus_3db_at_cutoff():
    from scipy.signal import sosfreqz

    spec = design_butterworth_lowpass(2000, 16000, 2)
    _, h = sosfreqz(spec.sos, worN=[2000.0], fs=16000)
    assert abs(20 * np.log10(abs(h[0])) + 3.0103) < 0.1


def test_dc_gain_unity():
    from scipy.signal import sosfreqz

    spec = design_butterworth_lowpass(5000, RATE, 100)
    _, h = sosfreqz(spec.sos, worN=[1e-6], fs=RATE)
    assert abs(abs(h[0]) - 1.0) < 1e-6


def test_cutoff_at_nyquist_rejected():
    with pytest.raises(FilterDesignError):
        design_butterworth_lowpass(RATE / 2, RATE, 100)


def test_odd_order_rejected():
    with pytest.raises(FilterDesignError):
        design_butterworth_lowpass(5000, RATE, 99)


def test_zero_signal_stays_zero(make_ts):
    spec = design_butterworth_lowpass(5000, RATE, 100)
    out = apply_filter(spec, make_ts(np.zeros(4096), rate=RATE))
    assert np.all(out.samples == 0.0)
    assert out.samples.size == 4096
    assert out.sample_rate_hz == RATE


def test_passband_tone_preserved(make_ts):
    spec = design_butterworth_lowpass(5000, RATE, 100)
    out = apply_filter(spec, make_ts(sine(100), rate=RATE))
    ratio = steady_amplitude(out.samples, RATE, 100)
    assert 0.99 <= ratio <= 1.01


def test_stopband_tone_attenuated(make_ts):
    spec = design_butterworth_lowpass(5000, RATE, 100)
    out = apply_filter(spec, make_ts(sine(12000), rate=RATE))
    assert steady_amplitude(out.samples, RATE, 100) <= 0.01


def test_linearity(make_ts):
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=2048), rng.normal(size=2048)
    a, b = 2.5, -1.3
    spec = design_butterworth_lowpass(5000, RATE, 8)
    fx = apply_filter(spec, make_ts(x, rate=RATE)).samples
    fy = apply_filter(spec, make_ts(y, rate=RATE)).samples
    fxy = apply_filter(spec, make_ts(a * x + b * y, rate=RATE)).samples
    scale = np.max(np.abs(fxy)) or 1.0
    assert np.max(np.abs(fxy - (a * fx + b * fy))) / scale < 1e-9


def test_large_amplitude_stays_finite(make_ts):
    rng = np.random.default_rng(1)
    spec = design_butterworth_lowpass(4500, RATE, 100)
    out = apply_filter(spec, make_ts(1e3 * rng.normal(size=8192), rate=RATE))
    assert np.all(np.isfinite(out.samples))


def test_decimate_160k_to_10k(make_ts):
    ts = make_ts(np.random.default_rng(2).normal(size=160000), rate=160000)
    out = decimate(ts, 10000)
    assert out.sample_rate_hz == 10000
    assert out.samples.size == 10000


def test_decimate_identity(make_ts):
    ts = make_ts(sine(100, rate=10000, seconds=0.1), rate=10000)
    out = decimate(ts, 10000)
    assert out is ts


def test_decimate_non_integer_factor(make_ts):
    ts = make_ts(np.ones(100), rate=10000)
    with pytest.raises(FilterDesignError):
        decimate(ts, 3000)


def test_decimated_tone_recovered(make_ts):
    ts = make_ts(sine(1000, rate=160000, seconds=1.0), rate=160000)
    out = decimate(ts, 10000)
    spec = amplitude_spectrum(out)
    peak_freq = spec.xs[np.argmax(spec.ys)]
    bin_width = spec.xs[1] - spec.xs[0]
    assert abs(peak_freq - 1000) <= bin_width


def test_inband_power_preserved(make_ts):
    # band-limited input: tones well inside the post-decimation band
    t = np.arange(160000) / 160000.0
    x = np.sin(2 * np.pi * 300 * t) + 0.5 * np.sin(2 * np.pi * 1200 * t)
    out = decimate(make_ts(x, rate=160000), 10000)
    # compare steady-state power, skipping the filter transient
    skip = 2000
    p_in = np.mean(x[skip * 16 :] ** 2)
    p_out = np.mean(out.samples[skip:] ** 2)
    assert abs(p_out - p_in) / p_in < 0.02
