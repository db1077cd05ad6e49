import json

import numpy as np
import pytest

from chatterkit.dataset import (
    LabeledDataset,
    RawLabel,
    load_manifest,
    split_by_config,
    to_binary,
)
from chatterkit.errors import ManifestError, SignalLoadError


def write_corpus(tmp_path, entries):
    for i, entry in enumerate(entries):
        if "values" in entry:
            (tmp_path / entry["file"]).write_text(
                "\n".join(str(v) for v in entry.pop("values")) + "\n"
            )
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps(entries))
    return manifest


def entry(fname, label, overhang=5.08, values=(0.1, -0.2, 0.3)):
    return {
        "file": fname,
        "sample_rate_hz": 10000,
        "overhang_cm": overhang,
        "rpm": 320,
        "depth_cm": 0.0127,
        "label": label,
        "values": list(values),
    }


def test_load_counts(tmp_path):
    manifest = write_corpus(
        tmp_path,
        [entry("a.csv", "chatter"), entry("b.csv", "chatter"), entry("c.csv", "stable")],
    )
    ds = load_manifest(manifest)
    assert len(ds) == 3
    assert len(ds.learnable) == 3


def test_missing_signal_file_named(tmp_path):
    manifest = write_corpus(tmp_path, [entry("a.csv", "stable")])
    bad = json.loads(manifest.read_text())
    bad.append({k: v for k, v in entry("ghost.csv", "stable").items() if k != "values"})
    manifest.write_text(json.dumps(bad))
    with pytest.raises(ManifestError, match="ghost.csv"):
        load_manifest(manifest)


def test_sample_rate_carried(tmp_path):
    manifest = write_corpus(tmp_path, [entry("a.csv", "stable")])
    ds = load_manifest(manifest)
    assert ds.records[0].sample_rate_hz == 10000


def test_malformed_manifest(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{not json")
    with pytest.raises(ManifestError):
        load_manifest(path)
    path.write_text(json.dumps({"not": "a list"}))
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_non_finite_sample_rejected(tmp_path):
    (tmp_path / "a.csv").write_text("0.1\nnan\n0.3\n")
    manifest = tmp_path / "manifest.json"
    e = entry("a.csv", "stable")
    e.pop("values")
    manifest.write_text(json.dumps([e]))
    with pytest.raises(SignalLoadError, match="non-finite"):
        load_manifest(manifest)


def test_header_line_tolerated(tmp_path):
    (tmp_path / "a.csv").write_text("acceleration\n0.1\n0.2\n")
    manifest = tmp_path / "manifest.json"
    e = entry("a.csv", "stable")
    e.pop("values")
    manifest.write_text(json.dumps([e]))
    ds = load_manifest(manifest)
    assert ds.records[0].samples.size == 2


def test_unknown_label_retained_but_excluded(tmp_path):
    manifest = write_corpus(
        tmp_path, [entry("a.csv", "unknown"), entry("b.csv", "chatter")]
    )
    ds = load_manifest(manifest)
    assert len(ds) == 2
    assert len(ds.learnable) == 1
    assert len(ds.excluded) == 1


def test_conflicting_config_id_rejected(tmp_path):
    e1 = entry("a.csv", "stable")
    e2 = entry("b.csv", "stable")
    e1["config_id"] = e2["config_id"] = "same"
    e2["rpm"] = 570
    manifest = write_corpus(tmp_path, [e1, e2])
    with pytest.raises(ManifestError, match="config_id"):
        load_manifest(manifest)


def test_to_binary_mapping():
    assert to_binary(RawLabel.STABLE) == 0
    assert to_binary(RawLabel.INTERMEDIATE) == 1
    assert to_binary(RawLabel.CHATTER) == 1
    assert to_binary(RawLabel.UNKNOWN) is None


def test_split_by_config_partition(tmp_path):
    manifest = write_corpus(
        tmp_path,
        [
            entry("a.csv", "stable", overhang=5.08),
            entry("b.csv", "chatter", overhang=5.08),
            entry("c.csv", "chatter", overhang=11.43),
        ],
    )
    ds = load_manifest(manifest)
    groups = split_by_config(ds)
    assert len(groups) == 2
    assert sorted(len(g) for g in groups.values()) == [1, 2]
    assert sum(len(g) for g in groups.values()) == len(ds)
    for group in groups.values():
        overhangs = {r.config.overhang_cm for r in group.records}
        assert len(overhangs) == 1


def test_four_overhangs_four_groups(tmp_path):
    entries = [
        entry(f"s{i}.csv", "stable", overhang=oh)
        for i, oh in enumerate([5.08, 6.35, 8.89, 11.43])
    ]
    ds = load_manifest(write_corpus(tmp_path, entries))
    assert len(split_by_config(ds)) == 4


def test_loading_deterministic(tmp_path):
    manifest = write_corpus(
        tmp_path, [entry("a.csv", "stable"), entry("b.csv", "chatter")]
    )
    d1 = load_manifest(manifest)
    d2 = load_manifest(manifest)
    assert len(d1) == len(d2)
    for r1, r2 in zip(d1.records, d2.records):
        assert np.array_equal(r1.samples, r2.samples)
        assert r1.label == r2.label
        assert r1.config == r2.config
