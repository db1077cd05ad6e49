import numpy as np
import pytest

from chatterkit.dataset import CuttingConfig, RawLabel, TimeSeries


@pytest.fixture
def config():
    return CuttingConfig(
        overhang_cm=5.08, spindle_rpm=320.0, depth_of_cut_cm=0.0127, config_id="c0"
    )


@pytest.fixture
def make_ts(config):
    def _make(samples, rate=10000.0, label=RawLabel.STABLE, record_id="r0"):
        return TimeSeries(
            samples=np.asarray(samples, dtype=float),
            sample_rate_hz=rate,
            config=config,
            label=label,
            record_id=record_id,
        )

    return _make


@pytest.fixture
def sine_ts(make_ts):
    def _make(freq, rate=10000.0, n=10000, amp=1.0, phase=0.0):
        t = np.arange(n) / rate
        return make_ts(amp * np.sin(2 * np.pi * freq * t + phase), rate=rate)

    return _make
