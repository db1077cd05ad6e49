"""Peak-coordinate feature vectors and labeled feature matrices.

A record's features are the (x, y) coordinates of the first n_peaks
peaks of its amplitude spectrum, PSD and ACF, concatenated in that
order: 6 * n_peaks values total (30 for five peaks, 12 for two).
"""

from dataclasses import dataclass, field

import numpy as np

from . import peaks as pk
from . import transform as tf
from .dataset import to_binary
from .errors import EvaluationError, PeakShortfall

_KIND_PREFIX = {tf.Kind.FFT: "fft", tf.Kind.PSD: "psd", tf.Kind.ACF: "acf"}


def feature_names(n_peaks):
    """Canonical column names: fft_p1_x, fft_p1_y, ..., acf_pK_y."""
    names = []
    for kind in (tf.Kind.FFT, tf.Kind.PSD, tf.Kind.ACF):
        for p in range(1, n_peaks + 1):
            names.append(f"{_KIND_PREFIX[kind]}_p{p}_x")
            names.append(f"{_KIND_PREFIX[kind]}_p{p}_y")
    return names


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    n_peaks: int
    record_id: str
    config_id: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        assert self.values.size == 6 * self.n_peaks
        self.values.setflags(write=False)


@dataclass(frozen=True)
class FeatureMatrix:
    X: np.ndarray  # (n_rows, 6*n_peaks)
    y: np.ndarray  # binary labels
    feature_names: tuple
    config_ids: tuple = ()
    record_ids: tuple = ()
    excluded: tuple = ()  # (record_id, reason) pairs dropped during assembly

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=int))
        if self.X.ndim != 2 or self.X.shape[0] != self.y.size:
            raise EvaluationError("X/y shape mismatch")
        if len(self.feature_names) != self.X.shape[1]:
            raise EvaluationError("feature_names length != column count")
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n_rows(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def subset_rows(self, idx):
        idx = np.asarray(idx)
        return FeatureMatrix(
            X=self.X[idx],
            y=self.y[idx],
            feature_names=self.feature_names,
            config_ids=tuple(np.asarray(self.config_ids)[idx]) if self.config_ids else (),
            record_ids=tuple(np.asarray(self.record_ids)[idx]) if self.record_ids else (),
        )


def extract_features(ts, n_peaks=pk.DEFAULT_N_PEAKS, alpha=pk.DEFAULT_ALPHA,
                     max_lag=None, psd_nperseg=None):
    """Transform one preprocessed record into its peak-coordinate vector.

    Raises PeakShortfall if any of the three transforms yields fewer
    than n_peaks admissible peaks; coordinates are never padded.
    """
    sequences = (
        tf.amplitude_spectrum(ts),
        tf.power_spectral_density(ts, nperseg=psd_nperseg),
        tf.autocorrelation(ts, max_lag=max_lag),
    )
    values = []
    for seq in sequences:
        found = pk.find_peaks(seq, pk.kind_defaults(seq.kind, alpha=alpha, n_peaks=n_peaks))
        if len(found) < n_peaks:
            raise PeakShortfall(seq.kind.value, len(found), n_peaks)
        for p in found[:n_peaks]:
            values.extend((p.x, p.y))
    return FeatureVector(
        values=np.array(values),
        n_peaks=n_peaks,
        record_id=ts.record_id,
        config_id=ts.config.config_id,
    )


def build_matrix(ds, n_peaks=pk.DEFAULT_N_PEAKS, alpha=pk.DEFAULT_ALPHA,
                 max_lag=None, psd_nperseg=None):
    """Feature matrix over the learnable records of a dataset.

    Rows hitting a peak shortfall are dropped and reported in
    FeatureMatrix.excluded rather than padded.
    """
    rows, labels, config_ids, record_ids, excluded = [], [], [], [], []
    for rec in ds.learnable:
        try:
            fv = extract_features(rec, n_peaks, alpha, max_lag, psd_nperseg)
        except PeakShortfall as exc:
            excluded.append((rec.record_id, str(exc)))
            continue
        rows.append(fv.values)
        labels.append(to_binary(rec.label))
        config_ids.append(fv.config_id)
        record_ids.append(fv.record_id)
    if not rows:
        raise EvaluationError("no usable rows after exclusions")
    return FeatureMatrix(
        X=np.vstack(rows),
        y=np.array(labels),
        feature_names=tuple(feature_names(n_peaks)),
        config_ids=tuple(config_ids),
        record_ids=tuple(record_ids),
        excluded=tuple(excluded),
    )


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray  # constant columns carry std 1 so they scale to zero

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def inverse(self, Z):
        return np.asarray(Z, dtype=float) * self.std + self.mean

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(mean=np.array(d["mean"]), std=np.array(d["std"]))


def standardize(X):
    """Fit a per-column scaler on training rows only."""
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return Scaler(mean=mean, std=std)
