"""The four classifier families behind one fit/predict/importance contract.

Linear models (SVM, logistic regression) train on standardized features
with the scaler fitted on the training rows only; tree ensembles consume
raw features. All training is deterministic given (kind, data, seed).
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import FitError
from .featurize import Scaler, standardize
from .trees import GradientBoosting, RandomForest, _Node, ClassificationTree

KINDS = ("svm", "lr", "rf", "gb")

SVM_C = 1.0
SVM_EPOCHS = 500
LR_LAMBDA = 1e-4
LR_TOL = 1e-8
LR_MAX_ITER = 10000
MODEL_FORMAT_VERSION = 1


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def hinge_loss_subgrad(w, Z1, y_signed, lam):
    """L2-regularized mean hinge loss and a subgradient.

    Z1 carries an appended all-ones bias column; w includes the bias
    weight as its last component.
    """
    n = y_signed.size
    margins = y_signed * (Z1 @ w)
    loss = 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(0.0, 1.0 - margins)))
    viol = margins < 1.0
    grad = lam * w - (Z1[viol].T @ y_signed[viol]) / n
    return loss, grad


def logistic_loss_grad(w, b, Z, y_signed, lam):
    """L2-regularized mean logistic loss and its exact gradient."""
    n = y_signed.size
    z = y_signed * (Z @ w + b)
    loss = float(np.mean(np.logaddexp(0.0, -z))) + 0.5 * lam * float(w @ w)
    coef = -y_signed * _sigmoid(-z) / n
    grad_w = Z.T @ coef + lam * w
    grad_b = float(coef.sum())
    return loss, grad_w, grad_b


def _fit_svm(Z, y_signed):
    """Full-batch subgradient descent on the hinge objective (1/(lam*t) steps)."""
    n, d = Z.shape
    lam = 1.0 / (SVM_C * n)
    Z1 = np.hstack([Z, np.ones((n, 1))])
    w = np.zeros(d + 1)
    for t in range(1, SVM_EPOCHS + 1):
        _, grad = hinge_loss_subgrad(w, Z1, y_signed, lam)
        w -= grad / (lam * t)
    return w


def _fit_lr(Z, y_signed):
    """Gradient descent with Armijo backtracking; stops at LR_TOL grad norm."""
    d = Z.shape[1]
    w = np.zeros(d)
    b = 0.0
    step = 1.0
    loss, gw, gb = logistic_loss_grad(w, b, Z, y_signed, LR_LAMBDA)
    for _ in range(LR_MAX_ITER):
        gnorm2 = float(gw @ gw) + gb * gb
        if np.sqrt(gnorm2) < LR_TOL:
            break
        step = min(step * 2.0, 1e8)
        while True:
            w_new = w - step * gw
            b_new = b - step * gb
            loss_new, gw_new, gb_new = logistic_loss_grad(
                w_new, b_new, Z, y_signed, LR_LAMBDA
            )
            if loss_new <= loss - 1e-4 * step * gnorm2 or step < 1e-16:
                break
            step *= 0.5
        w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
    return w, b


@dataclass(frozen=True)
class Model:
    kind: str
    feature_names: tuple
    seed: int
    scaler: Scaler  # None for tree models
    impl: object  # fitted state; depends on kind

    def _check_width(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or (X.size and X.shape[1] != len(self.feature_names)):
            raise FitError(
                f"expected {len(self.feature_names)} features, got "
                f"{X.shape[1] if X.ndim == 2 else '?'}"
            )
        return X

    def decision_scores(self, X):
        """Real-valued scores; score > 0 <=> predicted label 1."""
        X = self._check_width(X)
        if X.shape[0] == 0:
            return np.zeros(0)
        if self.kind == "svm":
            Z = self.scaler.transform(X)
            w = self.impl
            return Z @ w[:-1] + w[-1]
        if self.kind == "lr":
            Z = self.scaler.transform(X)
            w, b = self.impl
            return Z @ w + b
        if self.kind == "rf":
            return self.impl.vote_fraction(X) - 0.5
        return self.impl.decision_function(X)

    def predict(self, X):
        return (self.decision_scores(X) > 0).astype(int)

    def importance(self):
        """Non-negative per-feature scores (|weight| or impurity decrease)."""
        if self.kind == "svm":
            return np.abs(self.impl[:-1])
        if self.kind == "lr":
            return np.abs(self.impl[0])
        return self.impl.importance()

    def to_json(self):
        doc = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "feature_names": list(self.feature_names),
            "seed": self.seed,
            "scaler": self.scaler.to_dict() if self.scaler else None,
        }
        if self.kind == "svm":
            doc["weights"] = self.impl.tolist()
        elif self.kind == "lr":
            doc["weights"] = self.impl[0].tolist()
            doc["bias"] = self.impl[1]
        elif self.kind == "rf":
            doc["n_features"] = self.impl.n_features
            doc["trees"] = [
                {"root": t.root.to_dict(), "importance": t.importance_.tolist()}
                for t in self.impl.trees
            ]
        else:
            doc["base_score"] = self.impl.base_score
            doc["stages"] = [
                {
                    "root": t.root.to_dict(),
                    "scale": s,
                    "importance": t.importance_.tolist(),
                }
                for t, s in self.impl.stages
            ]
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise FitError(f"unsupported model format: {doc.get('format_version')}")
        kind = doc["kind"]
        scaler = Scaler.from_dict(doc["scaler"]) if doc["scaler"] else None
        if kind == "svm":
            impl = np.array(doc["weights"])
        elif kind == "lr":
            impl = (np.array(doc["weights"]), float(doc["bias"]))
        elif kind == "rf":
            forest = RandomForest(n_trees=len(doc["trees"]), seed=doc["seed"])
            forest.n_features = doc["n_features"]
            for td in doc["trees"]:
                tree = ClassificationTree()
                tree.root = _Node.from_dict(td["root"])
                tree.importance_ = np.array(td["importance"])
                forest.trees.append(tree)
            impl = forest
        elif kind == "gb":
            gb = GradientBoosting()
            gb.base_score = doc["base_score"]
            for sd in doc["stages"]:
                from .trees import RegressionTree

                tree = RegressionTree()
                tree.root = _Node.from_dict(sd["root"])
                tree.importance_ = np.array(sd["importance"])
                gb.stages.append((tree, sd["scale"]))
            impl = gb
        else:
            raise FitError(f"unknown classifier kind {kind!r}")
        return cls(
            kind=kind,
            feature_names=tuple(doc["feature_names"]),
            seed=doc["seed"],
            scaler=scaler,
            impl=impl,
        )


def fit(kind, X, y, seed=0, feature_names=None):
    """Train one classifier on a labeled matrix."""
    if kind not in KINDS:
        raise FitError(f"unknown classifier kind {kind!r} (expected one of {KINDS})")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] < 2:
        raise FitError("need at least 2 rows")
    if not np.all(np.isfinite(X)):
        raise FitError("non-finite feature values")
    if len(np.unique(y)) < 2:
        raise FitError("training labels contain a single class")
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(X.shape[1]))
    y_signed = 2.0 * y - 1.0

    scaler = None
    if kind in ("svm", "lr"):
        scaler = standardize(X)
        Z = scaler.transform(X)
        impl = _fit_svm(Z, y_signed) if kind == "svm" else _fit_lr(Z, y_signed)
    elif kind == "rf":
        impl = RandomForest(n_trees=100, seed=seed).fit(X, y)
    else:
        impl = GradientBoosting(n_rounds=100, learning_rate=0.1, max_depth=3).fit(X, y)
    return Model(
        kind=kind,
        feature_names=tuple(feature_names),
        seed=int(seed),
        scaler=scaler,
        impl=impl,
    )


def fit_matrix(kind, fm, seed=0):
    """fit() over a FeatureMatrix, carrying its column names."""
    return fit(kind, fm.X, fm.y, seed=seed, feature_names=fm.feature_names)
