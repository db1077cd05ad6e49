"""Decision-tree ensembles: CART trees, random forest, gradient boosting.

All split searches are deterministic: candidate features are scanned in
ascending index order, thresholds in ascending value order, and a split
is replaced only on a strict impurity improvement, so ties resolve to
the lowest feature index and then the lowest threshold.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class _Node:
    value: float  # majority class (classification) or leaf value (regression)
    feature: int = -1
    threshold: float = 0.0
    left: "._Node" = None
    right: "._Node" = None

    @property
    def is_leaf(self):
        return self.left is None

    def to_dict(self):
        if self.is_leaf:
            return {"value": self.value}
        return {
            "value": self.value,
            "feature": int(self.feature),
            "threshold": float(self.threshold),
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        node = cls(value=d["value"])
        if "feature" in d:
            node.feature = d["feature"]
            node.threshold = d["threshold"]
            node.left = cls.from_dict(d["left"])
            node.right = cls.from_dict(d["right"])
        return node


def _gini(n1, n):
    p1 = n1 / n
    return 1.0 - p1 * p1 - (1.0 - p1) ** 2


def _best_split_gini(X, y, features):
    """Best (feature, threshold, gini) over candidate features, or None."""
    n = y.size
    parent_n1 = int(y.sum())
    best = None  # (gini, feature, threshold)
    for j in features:
        x = X[:, j]
        order = np.argsort(x, kind="stable")
        xs, ys = x[order], y[order]
        splittable = np.nonzero(xs[1:] > xs[:-1])[0]
        if splittable.size == 0:
            continue
        cum1 = np.cumsum(ys)
        n_left = splittable + 1
        n1_left = cum1[splittable]
        n_right = n - n_left
        n1_right = parent_n1 - n1_left
        p1l = n1_left / n_left
        p1r = n1_right / n_right
        gini = (
            n_left * (1.0 - p1l**2 - (1.0 - p1l) ** 2)
            + n_right * (1.0 - p1r**2 - (1.0 - p1r) ** 2)
        ) / n
        k = int(np.argmin(gini))  # first minimum = lowest threshold
        if best is None or gini[k] < best[0]:
            i = splittable[k]
            best = (float(gini[k]), int(j), float(0.5 * (xs[i] + xs[i + 1])))
    return best


def _best_split_mse(X, t, features):
    """Variance-minimizing split for regression targets t."""
    n = t.size
    best = None
    for j in features:
        x = X[:, j]
        order = np.argsort(x, kind="stable")
        xs, ts = x[order], t[order]
        splittable = np.nonzero(xs[1:] > xs[:-1])[0]
        if splittable.size == 0:
            continue
        cum = np.cumsum(ts)
        cum2 = np.cumsum(ts * ts)
        n_left = splittable + 1
        n_right = n - n_left
        sl, sl2 = cum[splittable], cum2[splittable]
        sr, sr2 = cum[-1] - sl, cum2[-1] - sl2
        sse = (sl2 - sl * sl / n_left) + (sr2 - sr * sr / n_right)
        k = int(np.argmin(sse))
        if best is None or sse[k] < best[0]:
            i = splittable[k]
            best = (float(sse[k]), int(j), float(0.5 * (xs[i] + xs[i + 1])))
    return best


class ClassificationTree:
    """CART with Gini impurity; grows until pure or unsplittable."""

    def __init__(self, max_features=None, rng=None):
        self.max_features = max_features
        self.rng = rng
        self.root = None
        self.n_features = 0
        self.importance_ = None

    def _candidate_features(self, d):
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        picked = self.rng.choice(d, size=self.max_features, replace=False)
        return np.sort(picked)

    def _build(self, X, y, n_total):
        n = y.size
        n1 = int(y.sum())
        majority = 1 if n1 * 2 > n else 0
        if n < 2 or n1 == 0 or n1 == n:
            return _Node(value=majority)
        best = _best_split_gini(X, y, self._candidate_features(X.shape[1]))
        if best is None:
            return _Node(value=majority)
        child_gini, feature, threshold = best
        decrease = (_gini(n1, n) - child_gini) * n / n_total
        if decrease <= 0:
            return _Node(value=majority)
        self.importance_[feature] += decrease
        mask = X[:, feature] <= threshold
        node = _Node(value=majority, feature=feature, threshold=threshold)
        node.left = self._build(X[mask], y[mask], n_total)
        node.right = self._build(X[~mask], y[~mask], n_total)
        return node

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_features = X.shape[1]
        self.importance_ = np.zeros(self.n_features)
        self.root = self._build(X, y, y.size)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0], dtype=int)
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.value
        return out


class RegressionTree:
    """Squared-error CART used as the gradient-boosting base learner."""

    def __init__(self, max_depth=None):
        self.max_depth = max_depth
        self.root = None
        self.importance_ = None

    def _build(self, X, idx, t, h, depth, n_total):
        n = idx.size
        if h is None:
            leaf_value = float(t[idx].mean())
        else:
            denom = float(h[idx].sum())
            leaf_value = float(t[idx].sum() / denom) if denom > 1e-12 else 0.0
        if n < 2 or (self.max_depth is not None and depth >= self.max_depth):
            return _Node(value=leaf_value)
        sub = t[idx]
        if np.all(sub == sub[0]):
            return _Node(value=leaf_value)
        best = _best_split_mse(X[idx], sub, np.arange(X.shape[1]))
        if best is None:
            return _Node(value=leaf_value)
        sse, feature, threshold = best
        parent_sse = float(((sub - sub.mean()) ** 2).sum())
        decrease = (parent_sse - sse) / n_total
        if decrease <= 0:
            return _Node(value=leaf_value)
        self.importance_[feature] += decrease
        mask = X[idx, feature] <= threshold
        node = _Node(value=leaf_value, feature=feature, threshold=threshold)
        node.left = self._build(X, idx[mask], t, h, depth + 1, n_total)
        node.right = self._build(X, idx[~mask], t, h, depth + 1, n_total)
        return node

    def fit(self, X, targets, hessians=None):
        X = np.asarray(X, dtype=float)
        t = np.asarray(targets, dtype=float)
        self.importance_ = np.zeros(X.shape[1])
        self.root = self._build(X, np.arange(t.size), t, hessians, 0, t.size)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.value
        return out


class RandomForest:
    """Bagged Gini trees with sqrt(d) feature subsampling per split."""

    def __init__(self, n_trees=100, seed=0):
        self.n_trees = n_trees
        self.seed = seed
        self.trees = []
        self.n_features = 0

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        self.n_features = d
        max_features = int(np.ceil(np.sqrt(d)))
        children = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        self.trees = []
        for ss in children:
            rng = np.random.Generator(np.random.PCG64(ss))
            boot = rng.integers(0, n, size=n)
            tree = ClassificationTree(max_features=max_features, rng=rng)
            tree.fit(X[boot], y[boot])
            self.trees.append(tree)
        return self

    def vote_fraction(self, X):
        votes = np.zeros(np.asarray(X).shape[0])
        for tree in self.trees:
            votes += tree.predict(X)
        return votes / len(self.trees)

    def predict(self, X):
        return (self.vote_fraction(X) > 0.5).astype(int)

    def importance(self):
        total = np.zeros(self.n_features)
        for tree in self.trees:
            total += tree.importance_
        s = total.sum()
        return total / s if s > 0 else total


class GradientBoosting:
    """Depth-3 regression trees boosted on logistic loss.

    Each round fits a tree to the loss gradient with Newton leaf values;
    the leaf scale is halved (down to zero) whenever a full step would
    increase the training log-loss, which keeps the loss non-increasing.
    """

    def __init__(self, n_rounds=100, learning_rate=0.1, max_depth=3):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.base_score = 0.0
        self.stages = []  # (tree, scale) pairs
        self.loss_history_ = []

    @staticmethod
    def _logloss(F, y_signed):
        return float(np.mean(np.logaddexp(0.0, -y_signed * F)))

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        y_signed = 2.0 * y - 1.0
        p = np.clip(y.mean(), 1e-12, 1 - 1e-12)
        self.base_score = float(np.log(p / (1.0 - p)))
        F = np.full(y.size, self.base_score)
        loss = self._logloss(F, y_signed)
        self.stages = []
        self.loss_history_ = [loss]
        for _ in range(self.n_rounds):
            prob = 1.0 / (1.0 + np.exp(-F))
            residual = y - prob
            hessian = prob * (1.0 - prob)
            tree = RegressionTree(max_depth=self.max_depth).fit(X, residual, hessian)
            step = tree.predict(X)
            scale = self.learning_rate
            for _ in range(60):
                new_loss = self._logloss(F + scale * step, y_signed)
                if new_loss <= loss:
                    break
                scale *= 0.5
            else:
                scale = 0.0
                new_loss = loss
            F = F + scale * step
            loss = new_loss
            self.loss_history_.append(loss)
            self.stages.append((tree, scale))
        return self

    def decision_function(self, X):
        F = np.full(np.asarray(X).shape[0], self.base_score)
        for tree, scale in self.stages:
            F += scale * tree.predict(X)
        return F

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)

    def importance(self):
        d = self.stages[0][0].importance_.size if self.stages else 0
        total = np.zeros(d)
        for tree, scale in self.stages:
            if scale > 0:
                total += tree.importance_
        s = total.sum()
        return total / s if s > 0 else total
