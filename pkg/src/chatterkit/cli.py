"""Command-line entry point.

Subcommands: synth, features, eval, cv, transfer, rank-report,
dump-transform. Data goes to files or stdout; logs go to stderr. Exit
codes: 0 success, 1 usage/runtime error, 2 report-check failure.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from . import evaluate, featurize, learn, preprocess, rfe, synthgen, transform
from .dataset import load_manifest, split_by_config
from .errors import ChatterKitError
from .evaluate import _atomic_write


def _log(msg):
    print(msg, file=sys.stderr)


def _add_peak_flags(p):
    p.add_argument("--alpha", type=float, default=0.1, help="MPH fraction in [0,1]")
    p.add_argument("--n-peaks", type=int, default=2, help="peaks per transform")
    p.add_argument("--mpd-fft", type=int, default=500)
    p.add_argument("--mpd-acf", type=int, default=1000)
    p.add_argument("--mpd-psd", type=int, default=0)


def _add_preprocess_flags(p):
    p.add_argument("--target-rate-hz", type=float, default=10000.0)
    p.add_argument("--cutoff-hz", type=float, default=None,
                   help="anti-alias cutoff (default 0.9 x target Nyquist)")
    p.add_argument("--filter-order", type=int, default=100)


def _apply_mpd_overrides(args):
    from . import peaks as pk
    from .transform import Kind

    pk.MPD_BY_KIND[Kind.FFT] = args.mpd_fft
    pk.MPD_BY_KIND[Kind.ACF] = args.mpd_acf
    pk.MPD_BY_KIND[Kind.PSD] = args.mpd_psd


def _prepare(ds, args):
    """Decimate any record captured above the working rate."""
    from .dataset import LabeledDataset

    records = []
    for rec in ds.records:
        if rec.sample_rate_hz > args.target_rate_hz:
            rec = preprocess.decimate(
                rec, args.target_rate_hz,
                cutoff_hz=args.cutoff_hz, order=args.filter_order,
            )
        records.append(rec)
    return LabeledDataset(records=tuple(records), manifest_path=ds.manifest_path)


def _load_group(args, config_id=None):
    ds = load_manifest(args.manifest)
    ds = _prepare(ds, args)
    cid = config_id if config_id is not None else getattr(args, "config_id", None)
    if cid:
        groups = split_by_config(ds)
        if cid not in groups:
            raise ChatterKitError(
                f"dataset: config {cid!r} not in manifest "
                f"(have {sorted(groups)})"
            )
        ds = groups[cid]
    return ds


def _matrix(ds, args):
    return featurize.build_matrix(ds, n_peaks=args.n_peaks, alpha=args.alpha)


def cmd_synth(args):
    spec_a, spec_b = synthgen.default_spec_pair(
        seed=args.seed, freq_a=args.freq_a, freq_b=args.freq_b,
        n_per_class=args.n, amp_b=args.amp_b, noise_b=args.noise_b,
    )
    manifest = synthgen.write_corpus(args.out_dir, spec_a, spec_b)
    _log(f"wrote {args.n * 4} records under {args.out_dir}")
    print(manifest)
    return 0


def cmd_features(args):
    _apply_mpd_overrides(args)
    fm = _matrix(_load_group(args), args)
    for rid, reason in fm.excluded:
        _log(f"excluded {rid}: {reason}")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(list(fm.feature_names) + ["label", "config_id"])
    for i in range(fm.n_rows):
        writer.writerow(
            [repr(v) for v in fm.X[i]] + [int(fm.y[i]), fm.config_ids[i]]
        )
    _atomic_write(args.features_out, buf.getvalue())
    _log(f"wrote {fm.n_rows} x {fm.n_features} matrix to {args.features_out}")
    return 0


def _check_report(path):
    """Minimal schema check on an emitted report; exit code 2 on failure."""
    try:
        doc = json.loads(open(path, encoding="utf-8").read())
        rows = doc["results"]
        assert isinstance(rows, list) and rows
        for row in rows:
            for key in ("classifier", "rfe"):
                assert key in row
            for key, val in row.items():
                if key.startswith(("mean_", "std_")) or key.endswith("accuracy"):
                    assert 0.0 <= val <= 1.0
    except (Exception, AssertionError) as exc:
        _log(f"report check failed: {exc}")
        return 2
    return 0


def cmd_eval(args):
    _apply_mpd_overrides(args)
    fm = _matrix(_load_group(args), args)
    result = evaluate.repeated_split_eval(
        fm, args.classifier, use_rfe=args.rfe == "on",
        n_rep=args.reps, test_frac=args.test_frac, seed=args.seed,
        config_id=args.config_id or "",
    )
    evaluate.emit_report([result], args.out, fmt="json")
    _log(f"{args.classifier} rfe={args.rfe}: "
         f"test {result.mean_test:.3f} +- {result.std_test:.3f}")
    if args.check:
        return _check_report(args.out)
    return 0


def cmd_cv(args):
    _apply_mpd_overrides(args)
    fm = _matrix(_load_group(args), args)
    result = evaluate.kfold_cv(
        fm, args.classifier, use_rfe=args.rfe == "on",
        k=args.folds, seed=args.seed, config_id=args.config_id or "",
    )
    evaluate.emit_report([result], args.out, fmt="json")
    _log(f"{args.classifier} {args.folds}-fold: "
         f"test {result.mean_test:.3f} +- {result.std_test:.3f}")
    return 0


def cmd_transfer(args):
    _apply_mpd_overrides(args)
    source = _matrix(_load_group(args, args.source_config), args)
    target = _matrix(_load_group(args, args.target_config), args)
    result = evaluate.transfer_eval(
        source, target, args.classifier, use_rfe=args.rfe == "on", seed=args.seed
    )
    evaluate.emit_report([result], args.out, fmt="json")
    _log(f"{args.classifier} {args.source_config}->{args.target_config}: "
         f"test {result.test_accuracy:.3f}")
    return 0


def cmd_rank_report(args):
    _apply_mpd_overrides(args)
    fm = _matrix(_load_group(args), args)
    ranking = rfe.rank_features(fm.X, fm.y, args.classifier, seed=args.seed)
    result = evaluate.repeated_split_eval(
        fm, args.classifier, use_rfe=True, n_rep=args.reps, seed=args.seed,
        config_id=args.config_id or "",
    )
    counts = evaluate.ranking_frequency(result.selected_subsets, fm.n_features)
    rank_of = {idx: pos + 1 for pos, idx in enumerate(ranking.order)}
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["feature_name", "rank", "selection_count"])
    for i, name in enumerate(fm.feature_names):
        writer.writerow([name, rank_of[i], int(counts[i])])
    _atomic_write(args.out, buf.getvalue())
    _log(f"wrote ranking report to {args.out}")
    return 0


def cmd_dump_transform(args):
    ds = _load_group(args)
    matches = [r for r in ds.records if r.record_id == args.record_id]
    if not matches:
        raise ChatterKitError(f"dataset: record {args.record_id!r} not found")
    rec = matches[0]
    fn = {
        "fft": transform.amplitude_spectrum,
        "psd": transform.power_spectral_density,
        "acf": transform.autocorrelation,
    }[args.kind]
    seq = fn(rec)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["x", "y"])
    for x, y in zip(seq.xs, seq.ys):
        writer.writerow([repr(float(x)), repr(float(y))])
    _atomic_write(args.out, buf.getvalue())
    _log(f"wrote {len(seq)} {args.kind} points to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chatterkit",
        description="Peak-feature chatter classification pipeline.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic two-config corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--freq-a", type=float, default=800.0)
    p.add_argument("--freq-b", type=float, default=1600.0)
    p.add_argument("--n", type=int, default=30, help="records per class per config")
    p.add_argument("--amp-b", type=float, default=None)
    p.add_argument("--noise-b", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_synth)

    def experiment_parser(name, help_text):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("--manifest", required=True)
        q.add_argument("--classifier", choices=learn.KINDS, default="rf")
        q.add_argument("--rfe", choices=("on", "off"), default="off")
        q.add_argument("--seed", type=int, default=0)
        _add_peak_flags(q)
        _add_preprocess_flags(q)
        return q

    p = experiment_parser("features", "dump the feature matrix as CSV")
    p.add_argument("--config-id", default=None)
    p.add_argument("--features-out", required=True)
    p.set_defaults(fn=cmd_features)

    p = experiment_parser("eval", "repeated stratified-split evaluation")
    p.add_argument("--config-id", default=None)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--test-frac", type=float, default=0.33)
    p.add_argument("--out", required=True)
    p.add_argument("--check", action="store_true",
                   help="validate the emitted report (exit 2 on failure)")
    p.set_defaults(fn=cmd_eval)

    p = experiment_parser("cv", "stratified k-fold cross-validation")
    p.add_argument("--config-id", default=None)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_cv)

    p = experiment_parser("transfer", "train on one config, test on another")
    p.add_argument("--source-config", required=True)
    p.add_argument("--target-config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_transfer)

    p = experiment_parser("rank-report", "feature ranking and selection counts")
    p.add_argument("--config-id", default=None)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_rank_report)

    p = sub.add_parser("dump-transform", help="emit one transform as x,y CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config-id", default=None)
    p.add_argument("--record-id", required=True)
    p.add_argument("--kind", choices=("fft", "psd", "acf"), required=True)
    p.add_argument("--out", required=True)
    _add_preprocess_flags(p)
    p.set_defaults(fn=cmd_dump_transform)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map to the documented code 1
        return 0 if exc.code == 0 else 1
    try:
        return args.fn(args)
    except ChatterKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
