"""Experiment protocols: repeated splits, k-fold CV, transfer learning.

All splits are stratified by the binary label and every random draw is
derived from an explicit seed, so a whole experiment is reproducible
bit-for-bit.
"""

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import learn, rfe
from .errors import EvaluationError
from .seeds import rng_for


@dataclass(frozen=True)
class EvalResult:
    per_rep: tuple  # (train_accuracy, test_accuracy) pairs
    protocol: str
    classifier: str
    seed: int
    use_rfe: bool
    selected_subsets: tuple = ()  # chosen feature subsets, one per rep (RFE only)
    config_id: str = ""

    @property
    def mean_train(self):
        return float(np.mean([t for t, _ in self.per_rep]))

    @property
    def std_train(self):
        return float(np.std([t for t, _ in self.per_rep]))

    @property
    def mean_test(self):
        return float(np.mean([t for _, t in self.per_rep]))

    @property
    def std_test(self):
        return float(np.std([t for _, t in self.per_rep]))

    def as_row(self):
        return {
            "protocol": self.protocol,
            "config_id": self.config_id,
            "classifier": self.classifier,
            "rfe": self.use_rfe,
            "mean_train": self.mean_train,
            "std_train": self.std_train,
            "mean_test": self.mean_test,
            "std_test": self.std_test,
            "n_rep": len(self.per_rep),
        }


@dataclass(frozen=True)
class TransferResult:
    source_config: str
    target_config: str
    classifier: str
    use_rfe: bool
    train_accuracy: float
    test_accuracy: float
    seed: int
    selected_subset: tuple = ()

    def as_row(self):
        return {
            "protocol": "transfer",
            "source_config": self.source_config,
            "target_config": self.target_config,
            "classifier": self.classifier,
            "rfe": self.use_rfe,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
        }


def _accuracy(model, X, y, cols=None):
    if cols is not None:
        X = X[:, list(cols)]
    return float(np.mean(model.predict(X) == y))


def stratified_split(y, test_frac, rng):
    """Class-preserving train/test index split (ratio kept within 1 row)."""
    train_idx, test_idx = [], []
    for cls in np.unique(y):
        members = np.nonzero(y == cls)[0]
        perm = rng.permutation(members)
        n_test = int(round(test_frac * members.size))
        n_test = min(max(n_test, 1), members.size - 1)  # both sides non-empty
        test_idx.extend(perm[:n_test])
        train_idx.extend(perm[n_test:])
    return np.sort(np.array(train_idx)), np.sort(np.array(test_idx))


def stratified_folds(y, k, rng):
    """k stratified folds as index arrays (round-robin per class)."""
    if k < 2 or k > y.size:
        raise EvaluationError(f"k={k} incompatible with {y.size} rows")
    folds = [[] for _ in range(k)]
    offset = 0
    for cls in np.unique(y):
        members = rng.permutation(np.nonzero(y == cls)[0])
        for i, idx in enumerate(members):
            folds[(i + offset) % k].append(idx)
        offset += members.size % k
    return [np.sort(np.array(f, dtype=int)) for f in folds]


def _one_split_scores(fm, train_idx, test_idx, kind, use_rfe, seed):
    Xtr, ytr = fm.X[train_idx], fm.y[train_idx]
    Xte, yte = fm.X[test_idx], fm.y[test_idx]
    if use_rfe:
        subset, train_acc, test_acc = rfe.best_subset_for_split(
            Xtr, ytr, Xte, yte, kind, seed=seed
        )
        return train_acc, test_acc, subset
    model = learn.fit(kind, Xtr, ytr, seed=seed, feature_names=fm.feature_names)
    return _accuracy(model, Xtr, ytr), _accuracy(model, Xte, yte), ()


def repeated_split_eval(fm, kind, use_rfe=False, n_rep=10, test_frac=0.33, seed=0,
                        config_id=""):
    """n_rep independent stratified 67/33 splits, aggregated mean +- std."""
    if len(np.unique(fm.y)) < 2:
        raise EvaluationError("need both classes present")
    per_rep, subsets = [], []
    for r in range(n_rep):
        rng = rng_for(seed, "split", r)
        for attempt in range(100):
            train_idx, test_idx = stratified_split(fm.y, test_frac, rng)
            if len(np.unique(fm.y[train_idx])) == 2:
                break
        else:
            raise EvaluationError("could not draw a two-class training split")
        train_acc, test_acc, subset = _one_split_scores(
            fm, train_idx, test_idx, kind, use_rfe, seed
        )
        per_rep.append((train_acc, test_acc))
        subsets.append(subset)
    return EvalResult(
        per_rep=tuple(per_rep),
        protocol=f"repeated_split(n={n_rep},test_frac={test_frac})",
        classifier=kind,
        seed=int(seed),
        use_rfe=use_rfe,
        selected_subsets=tuple(subsets) if use_rfe else (),
        config_id=config_id,
    )


def kfold_cv(fm, kind, use_rfe=False, k=10, seed=0, config_id=""):
    """Stratified k-fold cross-validation."""
    if len(np.unique(fm.y)) < 2:
        raise EvaluationError("need both classes present")
    rng = rng_for(seed, "fold")
    folds = stratified_folds(fm.y, k, rng)
    all_idx = np.arange(fm.n_rows)
    per_rep, subsets = [], []
    for i, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, test_idx)
        if len(np.unique(fm.y[train_idx])) < 2:
            raise EvaluationError(f"fold {i}: training part is single-class")
        if test_idx.size == 0:
            raise EvaluationError(f"fold {i}: empty test fold")
        train_acc, test_acc, subset = _one_split_scores(
            fm, train_idx, test_idx, kind, use_rfe, seed
        )
        per_rep.append((train_acc, test_acc))
        subsets.append(subset)
    return EvalResult(
        per_rep=tuple(per_rep),
        protocol=f"kfold(k={k})",
        classifier=kind,
        seed=int(seed),
        use_rfe=use_rfe,
        selected_subsets=tuple(subsets) if use_rfe else (),
        config_id=config_id,
    )


def transfer_eval(source, target, kind, use_rfe=False, seed=0,
                  n_internal_splits=5):
    """Train on all source rows, score on all target rows.

    With RFE the ranking is computed on all source rows and the subset
    size is chosen by internal stratified splits of the source; target
    rows never influence training, ranking, or scaling.
    """
    if tuple(source.feature_names) != tuple(target.feature_names):
        raise EvaluationError("source/target feature layouts differ")
    if len(np.unique(source.y)) < 2:
        raise EvaluationError("source has a single class")
    cols = None
    subset = ()
    if use_rfe:
        ranking = rfe.rank_features(source.X, source.y, kind, seed=seed)

        def protocol(X_sub, y):
            accs = []
            for r in range(n_internal_splits):
                rng = rng_for(seed, "transfer", r)
                tr, te = stratified_split(y, 0.33, rng)
                model = learn.fit(kind, X_sub[tr], y[tr], seed=seed)
                accs.append(float(np.mean(model.predict(X_sub[te]) == y[te])))
            return float(np.mean(accs))

        best_k, _ = rfe.select_best_k(source.X, source.y, kind, ranking, protocol)
        subset = tuple(ranking.order[:best_k])
        cols = list(subset)
    Xtr = source.X if cols is None else source.X[:, cols]
    Xte = target.X if cols is None else target.X[:, cols]
    model = learn.fit(kind, Xtr, source.y, seed=seed)
    src_id = source.config_ids[0] if source.config_ids else "source"
    tgt_id = target.config_ids[0] if target.config_ids else "target"
    return TransferResult(
        source_config=src_id,
        target_config=tgt_id,
        classifier=kind,
        use_rfe=use_rfe,
        train_accuracy=float(np.mean(model.predict(Xtr) == source.y)),
        test_accuracy=float(np.mean(model.predict(Xte) == target.y)),
        seed=int(seed),
        selected_subset=subset,
    )


def ranking_frequency(selected_subsets, n_features):
    """How often each feature index appears in the selected subsets."""
    counts = np.zeros(n_features, dtype=int)
    for subset in selected_subsets:
        for idx in subset:
            counts[idx] += 1
    return counts


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(results, path, fmt="json"):
    """Write EvalResult/TransferResult rows as JSON or CSV, atomically."""
    rows = [r.as_row() for r in results]
    if fmt == "json":
        _atomic_write(path, json.dumps({"results": rows}, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        header = sorted({key for row in rows for key in row})
        import io

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        _atomic_write(path, buf.getvalue())
    else:
        raise EvaluationError(f"unknown report format {fmt!r}")
    return path
